use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A sampler or caller-supplied model broke the split-vector contract.
    #[error("model violation: {0}")]
    ModelViolation(String),
    /// The requested method is not available for this model.
    #[error("not supported: {0}")]
    Capability(String),
    /// A numerical routine could not reach the requested tolerance.
    #[error("failed to converge: {0}")]
    Convergence(String),
    /// A serialized artifact could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
