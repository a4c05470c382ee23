use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid input values: bad dimension, mismatched shapes, out-of-range indices.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid, backend or method configuration that cannot be honoured.
    #[error("configuration error: {0}")]
    Config(String),

    /// A documented precondition of the operation does not hold for the input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("singular point: x and y coincide")]
    SingularPoint,

    /// Malformed field file. `offset` is the byte offset where reading failed.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
