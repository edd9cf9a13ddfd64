//! Experiment harness for the inflow solvers: TOML configuration, dispatch
//! to the solver crates, JSON and CSV reports, report comparison and the
//! acceptance suite.

pub mod acceptance;
pub mod compare;
pub mod config;
pub mod error;
pub mod oned;
pub mod pipe3d;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, Module};
pub use error::{HarnessError, Result};
pub use report::SolveReport;
pub use run::run;
