use thiserror::Error;

/// Errors raised by the solvers and their supporting primitives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular matrix (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, FracError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FracError::InvalidParameter(msg.into()))
}
