use thiserror::Error;

/// Errors raised by the counting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity that must be an integer (or must agree with an independent
    /// derivation) came out otherwise. Always an internal bug, never rounded.
    #[error("integrality failure: {0}")]
    Integrality(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn integrality(msg: impl Into<String>) -> Self {
        Error::Integrality(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
