//! Batch driver for resonance ladders: TOML configs in, CSV/JSON tables
//! and figure data out.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{Format, Precision, RunConfig};
pub use error::{CliError, Result};
pub use run::{run, solve, RunReport};
