use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map one-to-one onto the CLI exit statuses, so callers can
/// tell a bad argument from a resource cap or a failed precondition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    #[error("numerical validity: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
