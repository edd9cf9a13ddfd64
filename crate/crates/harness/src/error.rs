use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    /// A solver rejected its input or failed to converge.
    #[error("solver error: {0}")]
    Solver(String),
    #[error("report schema mismatch: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// Process exit status: 3 for solver failures, 2 for everything the
    /// user has to fix (config, files, schemas).
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Solver(_) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Solver(_) => "solver",
            HarnessError::Schema(_) => "schema",
            HarnessError::Io(_) => "io",
        }
    }

    pub fn to_record(&self) -> ErrorRecord {
        ErrorRecord { kind: self.kind().into(), message: self.to_string(), exit_code: self.exit_code() }
    }
}

/// Structured form written to `error.json` and stderr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl From<inflow_core::Error> for HarnessError {
    fn from(e: inflow_core::Error) -> Self {
        match e {
            inflow_core::Error::InvalidProblem(m) => HarnessError::Config(m),
            other => HarnessError::Solver(other.to_string()),
        }
    }
}

impl From<inflow_pipe::PipeError> for HarnessError {
    fn from(e: inflow_pipe::PipeError) -> Self {
        match e {
            inflow_pipe::PipeError::Precondition(m) => HarnessError::Config(m),
            other => HarnessError::Solver(other.to_string()),
        }
    }
}
