use crate::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("problem too large: {0}")]
    Size(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("logarithm argument vanishes (|arg| = {0:e})")]
    Singular(f64),

    #[error("iteration produced a non-finite value after {iterations} steps")]
    Divergence { iterations: usize, last_finite: Vec<C64> },

    #[error("fixed point not converged (residual {residual:e} after {iterations} steps)")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular(_)
                | Error::Divergence { .. }
                | Error::NotConverged { .. }
                | Error::Inconsistent(_)
        )
    }
}
