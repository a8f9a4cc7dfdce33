use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("dimension {dim} exceeds the dense cap {cap}")]
    Capacity { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular (min |eigenvalue| = {min_abs:e})")]
    Singular { min_abs: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min:e})")]
    NotPsd { min: f64 },
    #[error("operator is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("promise violated: {0}")]
    PromiseViolation(String),
}

