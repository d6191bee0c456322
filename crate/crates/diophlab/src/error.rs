use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Exact evaluation was requested for a quantity that is irrational.
    #[error("exact evaluation unavailable: {0}")]
    ExactUnavailable(String),
    /// Parameters exceed the range the exact fast-path arithmetic supports.
    #[error("unsupported parameter range: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn not_exact(msg: impl Into<String>) -> Self {
        Error::ExactUnavailable(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
