use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is singular to working precision at pivot step {step}")]
    Singular { step: usize },

    #[error("matrix is not positive definite (factorization failed at column {column})")]
    NotPositiveDefinite { column: usize },

    #[error("response has zero sample variance")]
    ZeroVarianceResponse,

    #[error("response is not binary: value {value} at row {row}")]
    NonBinaryResponse { row: usize, value: f64 },

    #[error("two-sample statistic needs both groups non-empty (group 0: {n0}, group 1: {n1})")]
    SingleGroup { n0: usize, n1: usize },
}
