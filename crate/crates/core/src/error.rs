//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A state lies outside the domain of the flux (for example a
    /// non-positive specific volume).
    #[error("state {state:?} outside the domain of system `{system}`")]
    Domain { system: String, state: Vec<f64> },

    #[error("hyperbolicity violated: {0}")]
    Hyperbolicity(String),

    /// An eigenvalue came closer to zero than the configured floor.
    #[error("characteristic degeneracy: |lambda| = {lambda:.3e} below floor {floor:.3e}")]
    Degeneracy { lambda: f64, floor: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("ode integration failed: {0}")]
    Ode(String),

    /// The a-priori bound that keeps the linearization well posed was
    /// exceeded at some level of the outer iteration.
    #[error("stability budget exceeded at level {level}: norm {norm:.4e} > delta {delta:.4e}")]
    StabilityBudget { level: usize, norm: f64, delta: f64 },

    #[error("iteration diverged in {stage}: ratios {ratios:?}")]
    Divergence { stage: String, ratios: Vec<f64> },
}
