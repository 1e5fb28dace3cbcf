use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a numerical validity check (Hermiticity, trace, norm, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Subsystem structure is missing or inconsistent with the request.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The request exceeds a documented size cap.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The optimizer produced a value that contradicts a proven bound.
    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("malformed state file at `{path}`: {message}")]
    Format { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
