//! Independent cross-checks: brute-force quadrature of single matrix
//! elements from pointwise basis values, and a complex-rotated
//! finite-difference solver.

use num_complex::Complex64;

use crate::basis::{BasisKind, BasisSpec, ParamPoint};
use crate::error::Result;
use crate::linalg::tridiagonal_symmetric_eigenvalues;
use crate::matelem::build_matrix;
use crate::potentials::{eval, Domain, PotentialSpec};
use crate::quadrature::GaussLegendre;

/// Points per Gauss-Legendre panel in [`quadrature_element`].
const PANEL: usize = 40;

/// `(φ_j | Ĥ φ_m)` by composite Gauss-Legendre quadrature with about
/// `nodes` points.
///
/// Oscillator bases are integrated on a truncated stretch of the real axis
/// around `Re t`, wide enough for the Gaussian envelope to fall below
/// `e^{-45}`; trig bases along the ray `x = L u`, `u ∈ [-1, 1]` or `[0, 1]`.
pub fn quadrature_element(
    basis: &BasisSpec<f64>,
    potential: &PotentialSpec<f64>,
    params: &ParamPoint<f64>,
    j: usize,
    m: usize,
    nodes: usize,
) -> Result<Complex64> {
    basis.check_params(params)?;
    let panels = nodes.div_ceil(PANEL).max(1);
    let gl = GaussLegendre::<f64>::new(PANEL);
    let h_phi = |z: Complex64| -> Result<Complex64> {
        let (phi_m, d2) = basis.eval_with_second(m, params, z);
        Ok(-0.5 * d2 + eval(potential, z)? * phi_m)
    };
    let integrand = |z: Complex64| -> Result<Complex64> { Ok(basis.eval_with_second(j, params, z).0 * h_phi(z)?) };
    let mut err = None;
    let mut guard = |z: Complex64| match integrand(z) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let value = match basis.kind() {
        BasisKind::Ho | BasisKind::ShiftedHo | BasisKind::RadialHo => {
            let w = params.omega.expect("checked");
            let center = params.t.map_or(0.0, |t| t.re);
            let shift = params.t.map_or(0.0, |t| t.im.abs());
            let degree = (basis.index(j) + basis.index(m) + 2 * potential.max_monomial_power() as usize) as f64;
            let half_width = ((90.0 + 2.0 * degree) / w.re).sqrt() + 2.0 * shift * (1.0 + w.im.abs() / w.re);
            if basis.kind() == BasisKind::RadialHo {
                gl.integrate_composite(0.0, half_width, panels, |r| guard(Complex64::new(r, 0.0)))
            } else {
                gl.integrate_composite(center - half_width, center + half_width, panels, |x| {
                    guard(Complex64::new(x, 0.0))
                })
            }
        }
        _ => {
            let l = params.l.expect("checked");
            let lo = if basis.kind() == BasisKind::RadialTrig { 0.0 } else { -1.0 };
            l * gl.integrate_composite(lo, 1.0, panels, |u| guard(l * u))
        }
    };
    match err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Relative tolerance of the closed-form-vs-quadrature gate.
pub const GATE_TOL: f64 = 1e-11;
/// Leading block compared by [`gate_error`].
pub const GATE_DIM: usize = 9;
/// Quadrature nodes per element in the gate.
pub const GATE_NODES: usize = 2400;

// On the real axis the integrand of a degree-n element at complex Ω cancels
// by a factor growing like e^{n |arg Ω|}; at arg Ω ≈ −37° and n = 16 it is
// ~1e4, which puts the double-precision oracle itself at the 1e-11 level.
// The complex gate points therefore stay at |arg Ω| ≈ 0.4.
const OSC_COMPLEX: Complex64 = Complex64::new(1.0, -0.4);

/// One real and one complex parameter point per family at which the
/// quadrature oracle is accurate enough to gate the closed forms.
pub fn gate_points(basis: &BasisSpec<f64>) -> Vec<ParamPoint<f64>> {
    let c = Complex64::new;
    match basis.kind() {
        BasisKind::Ho => vec![ParamPoint::omega(c(1.3, 0.0)), ParamPoint::omega(OSC_COMPLEX)],
        BasisKind::ShiftedHo => vec![
            ParamPoint::shifted(c(1.2, 0.0), c(0.4, 0.0)),
            ParamPoint::shifted(OSC_COMPLEX, c(-0.6, -0.8)),
        ],
        BasisKind::RadialHo => vec![ParamPoint::omega(c(1.1, 0.0)), ParamPoint::omega(OSC_COMPLEX)],
        BasisKind::TrigEven | BasisKind::TrigOdd => {
            vec![ParamPoint::box_width(c(6.0, 0.0)), ParamPoint::box_width(c(5.1, 2.9))]
        }
        BasisKind::RadialTrig => vec![ParamPoint::box_width(c(7.0, 0.0)), ParamPoint::box_width(c(-0.84, 6.66))],
    }
}

/// Largest deviation between [`build_matrix`] and [`quadrature_element`]
/// over the leading `GATE_DIM` block, each element scaled by
/// `max(|H_jm|, √|H_jj H_mm|)` so that elements zero by symmetry are
/// measured against their row and column. Returns `(error, j, m)`.
pub fn gate_error(
    basis: &BasisSpec<f64>,
    potential: &PotentialSpec<f64>,
    p: &ParamPoint<f64>,
) -> Result<(f64, usize, usize)> {
    let h = build_matrix(basis, potential, p, GATE_DIM)?.entries;
    let mut worst = (0.0f64, 0, 0);
    for j in 0..GATE_DIM {
        for m in 0..GATE_DIM {
            let q = quadrature_element(basis, potential, p, j, m, GATE_NODES)?;
            let scale = h[(j, m)].norm().max((h[(j, j)].norm() * h[(m, m)].norm()).sqrt());
            let e = (q - h[(j, m)]).norm() / scale;
            if e > worst.0 {
                worst = (e, j, m);
            }
        }
    }
    Ok(worst)
}

/// Complex-rotated finite-difference discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSolveSpec {
    /// Rotation angle in `(0, π/2)`.
    pub theta: f64,
    /// Box radius; tails of the states of interest must be negligible at `R`.
    pub radius: f64,
    /// Number of interior grid points, at least 64.
    pub points: usize,
    pub domain: Domain,
    /// Combine the grid with a second one at half the spacing so the
    /// three-point error `O(h²)` cancels for isolated eigenvalues.
    pub extrapolate: bool,
}

impl GridSolveSpec {
    pub fn new(theta: f64, radius: f64, points: usize, domain: Domain) -> Self {
        GridSolveSpec {
            theta,
            radius,
            points,
            domain,
            extrapolate: true,
        }
    }
}

/// Eigenvalues of `−e^{−2iθ}/2 d²/dx² + V(x e^{iθ})` with Dirichlet walls.
///
/// Resonances appear as isolated eigenvalues that do not move with `θ`;
/// continuum eigenvalues lie along rays rotated by `2θ`. With
/// `extrapolate`, each eigenvalue of the coarse grid is paired with the
/// nearest fine-grid eigenvalue and Richardson-combined; only isolated
/// eigenvalues are meaningful after that step.
pub fn rotated_grid_solve(potential: &PotentialSpec<f64>, spec: &GridSolveSpec) -> Result<Vec<Complex64>> {
    assert!(spec.points >= 64, "grid needs at least 64 points");
    let coarse = grid_eigenvalues(potential, spec, spec.points)?;
    if !spec.extrapolate {
        return Ok(coarse);
    }
    // doubling the intervals keeps every coarse node
    let fine = grid_eigenvalues(potential, spec, 2 * spec.points + 1)?;
    Ok(coarse
        .iter()
        .map(|&e| {
            let nearest = fine
                .iter()
                .copied()
                .min_by(|a, b| (a - e).norm().total_cmp(&(b - e).norm()))
                .expect("non-empty grid");
            (4.0 * nearest - e) / 3.0
        })
        .collect())
}

fn grid_eigenvalues(potential: &PotentialSpec<f64>, spec: &GridSolveSpec, n: usize) -> Result<Vec<Complex64>> {
    let rot = Complex64::from_polar(1.0, spec.theta);
    let kin = Complex64::from_polar(1.0, -2.0 * spec.theta);
    let (start, h) = match spec.domain {
        Domain::FullLine => {
            let h = 2.0 * spec.radius / (n + 1) as f64;
            (-spec.radius, h)
        }
        Domain::HalfLine => (0.0, spec.radius / (n + 1) as f64),
    };
    let mut diag = Vec::with_capacity(n);
    for k in 1..=n {
        let x = start + h * k as f64;
        diag.push(kin / (h * h) + eval(potential, rot * x)?);
    }
    let off = vec![-kin / (2.0 * h * h); n - 1];
    tridiagonal_symmetric_eigenvalues(&diag, &off)
}
