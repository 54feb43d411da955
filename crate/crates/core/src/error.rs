use thiserror::Error;

/// Errors raised by the model, the spectrum builders and the ED oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("outside the domain of definition: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} needs L <= {cap}, got L = {l}")]
    Capacity { what: &'static str, cap: usize, l: usize },

    #[error("singular Bloch loop: {0}")]
    SingularLoop(String),

    #[error("eigensolver failed on a {dim}x{dim} block: {reason}")]
    Eigensolver { dim: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("multiset sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
