//! Complex resonance eigenvalues `ε = E − iΓ/2` of one-dimensional and
//! radial Schrödinger operators by the optimized Rayleigh-Ritz method.
//!
//! The pipeline per matrix dimension `M`:
//!
//! 1. [`matelem::trace_fn`] builds the trace of the Rayleigh-Ritz matrix as
//!    an analytic function of the complex basis parameters,
//! 2. [`optimizer`] finds its stationary points and picks one,
//! 3. [`matelem::build_matrix`] assembles the complex symmetric matrix,
//! 4. [`spectrum::eigenvalues`] diagonalizes it,
//!
//! and [`spectrum::resonances`] keeps the eigenvalues that stabilize across
//! a ladder of increasing `M`.

pub mod basis;
pub mod error;
pub mod linalg;
pub mod matelem;
pub mod optimizer;
pub mod oracle;
pub mod potentials;
pub mod quad_double;
pub mod quadrature;
pub mod real;
pub mod spectrum;

pub use error::{Error, Result};
pub use quad_double::QuadDouble;
pub use real::{ComplexExt, Cx, Real};
