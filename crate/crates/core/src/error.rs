use std::io;

use thiserror::Error;

/// Errors produced by the index, the file readers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} bits, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("unsupported code length {bits} (allowed: 1..={max})")]
    UnsupportedLength { bits: usize, max: usize },

    #[error("invalid weight at bit {bit}: {value}")]
    InvalidWeight { bit: usize, value: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    pub(crate) fn dimension(expected: usize, actual: usize) -> Self {
        Error::Dimension { expected, actual }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
