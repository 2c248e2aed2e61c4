use thiserror::Error;

/// Errors raised by the coreset library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoresetError {
    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weight {weight} at point {index}")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("total weight must be positive")]
    ZeroTotalWeight,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),
}

pub type Result<T, E = CoresetError> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> CoresetError {
    CoresetError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
