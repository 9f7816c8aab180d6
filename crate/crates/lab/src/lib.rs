//! Experiment harness for the Condorcet winner search lab: JSON experiment
//! configs, a parallel runner with per-replicate RNG streams, CSV output for
//! the plotting scripts, and numerical checks of the analytical claims.

pub mod checks;
pub mod config;
pub mod error;
pub mod figures;
pub mod runner;
pub mod schema;
pub mod selftest;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
pub use runner::{run_experiment, ExperimentResult};
