//! Crate-wide error type.
//!
//! The split mirrors how callers react: `Schema` is malformed input data,
//! `Validation` is well-formed data describing an inconsistent object,
//! `Domain` is an operation applied outside its precondition, `Numeric` is a
//! floating-point computation that failed to meet its target.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
