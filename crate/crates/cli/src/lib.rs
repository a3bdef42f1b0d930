//! Batch runner for the secure-BLER engine: figure sweeps, analytic versus
//! Monte Carlo validation, the CLT K-S study and the high-power ceiling, all
//! written as CSV.

pub mod config;
mod error;
pub mod output;
pub mod sweep;

pub use config::{Axis, Mode, SweepSpec};
pub use error::{CliError, CliResult};
