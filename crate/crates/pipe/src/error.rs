use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipeError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("stability budget exceeded at iteration {iteration}: {norm:.4e} > {delta:.4e}")]
    StabilityBudget { iteration: usize, norm: f64, delta: f64 },
    #[error("{stage} iteration is not contracting, ratios {ratios:?}")]
    Divergence { stage: String, ratios: Vec<f64> },
    #[error(transparent)]
    Core(#[from] inflow_core::Error),
}

pub type Result<T> = std::result::Result<T, PipeError>;
