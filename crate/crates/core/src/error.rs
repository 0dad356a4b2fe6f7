use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
