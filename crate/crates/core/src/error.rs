use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Tensor or frame dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Training produced a non-finite loss or gradient.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed container, checkpoint, or config file.
    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
