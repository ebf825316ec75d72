use thiserror::Error;

/// Errors raised by the approximation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Cholesky pivot `index` fell below the relative threshold (or was not positive).
    #[error("ill-conditioned basis: pivot {index} is {pivot:e} (largest diagonal {max_diag:e})")]
    IllConditionedBasis {
        index: usize,
        pivot: f64,
        max_diag: f64,
    },

    #[error("malformed signal: {0}")]
    MalformedSignal(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
