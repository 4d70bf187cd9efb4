//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands belong to different fields.
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    /// A quadratic has no root in the current field; finite fields can be
    /// extended, rationals cannot.
    #[error("no root in field: {0}")]
    NoRootInField(String),
    #[error("rational field cannot be extended")]
    CannotExtendRationals,
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("designated vector part is zero")]
    ZeroVector,
    #[error("matrix is not unimodular (det != 1)")]
    NotUnimodular,
    #[error("bad elementary indices: ({0}, {1})")]
    BadIndices(usize, usize),
    #[error("first octonion does not have type K1")]
    NotK1,
    #[error("octonion is not traceless")]
    NotTraceless,
    #[error("field too large: {0}")]
    FieldTooLarge(String),
    #[error("generic octonion index {0} out of range (point has {1} entries)")]
    IndexOutOfRange(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid field descriptor: {0}")]
    InvalidField(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    /// Process exit code used by the CLI: 2 parse, 3 math, 4 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidField(_) => 2,
            Error::Verification(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
