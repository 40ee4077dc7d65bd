use thiserror::Error;

/// Errors produced by code construction, decoding and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length {got} is not a power of two")]
    NotPowerOfTwo { got: usize },

    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid code spec: {0}")]
    InvalidCodeSpec(String),

    #[error("invalid damping schedule: {0}")]
    InvalidSchedule(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
