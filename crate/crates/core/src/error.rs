use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a structural precondition
    /// (dimension mismatch, non-stochastic row, out-of-range index, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request is well-formed but lies outside the achievable set
    /// (rate budget exceeded, target above the attainable maximum).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative routine failed to converge within its iteration cap.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The request would exceed a configured size or storage cap.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
