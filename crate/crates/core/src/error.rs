use thiserror::Error;

/// Error kinds map onto the CLI exit-code contract:
/// schema errors exit 2, precondition violations exit 3, and internal
/// invariant breaches exit 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or schema-invalid input (files, parameter sets).
    #[error("schema error: {0}")]
    Schema(String),
    /// A domain precondition was violated by otherwise well-formed input.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An internal invariant broke; indicates a bug, not bad input.
    #[error("internal invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
