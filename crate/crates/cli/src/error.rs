use riemann_core::RiemannError;
use thiserror::Error;

/// Exit status for malformed input, unreadable files and bad parameters.
pub const EXIT_INPUT: i32 = 2;
/// Exit status when a solver or invariant check fails.
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),

    /// `state` is the serialized context of the failure.
    #[error("solver failure: {message}")]
    Solver {
        message: String,
        state: serde_json::Value,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Solver { .. } => EXIT_SOLVER,
        }
    }

    /// Sorts a solver error into bad input or a failed assertion.
    pub fn from_solver(e: RiemannError, state: serde_json::Value) -> Self {
        match e {
            RiemannError::Domain(_) | RiemannError::Parameter(_) | RiemannError::Shape(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Solver {
                message: e.to_string(),
                state,
            },
        }
    }
}
