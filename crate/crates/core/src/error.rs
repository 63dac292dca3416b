use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("inner product {ip} is not attainable for length {n}")]
    InvalidInnerProduct { n: usize, ip: i64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported code: {0}")]
    UnsupportedCode(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn dim(expected: usize, actual: usize) -> Self {
        Error::Dimension { expected, actual }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
