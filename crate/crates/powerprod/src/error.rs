//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative exponent entry at ({row}, {col})")]
    NegativeExponent { row: usize, col: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("size cap exceeded: matrix side {side} > cap {cap}")]
    SizeCapExceeded { side: String, cap: usize },

    /// An internal cross-check failed; this signals a construction or
    /// ordering bug, never bad user input.
    #[error("internal consistency failure: {0}")]
    ConstructionBug(String),

    #[error("factorization incomplete: residual cofactor {0}")]
    IncompleteFactorization(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn bug(msg: impl Into<String>) -> Self {
        Error::ConstructionBug(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
