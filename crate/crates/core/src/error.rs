use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (bad ids, mismatched models, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A text stream could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// The instance exceeds an exact-computation capacity bound.
    #[error("instance too large: {0}")]
    Capacity(String),
    /// A randomized generator exhausted its restart budget.
    #[error("graph generation failed: {0}")]
    Generation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn capacity(msg: impl Into<String>) -> Error {
    Error::Capacity(msg.into())
}
