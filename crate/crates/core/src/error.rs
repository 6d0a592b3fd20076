use thiserror::Error;

/// Errors raised by the grid, solver and sweep layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("compatibility violated: {0}")]
    Compatibility(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("missing input: {0}")]
    Missing(String),
    #[error("solver breakdown: {0}")]
    Solver(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
