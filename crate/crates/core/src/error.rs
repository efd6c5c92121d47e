use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured limit {max_dim}")]
    SizeLimit { dim: u128, max_dim: usize },
    #[error("enumeration of {count} words exceeds the cap {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("group order exceeds the cap {cap}")]
    OrderCap { cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian: |a_ij - conj(a_ji)| = {deviation:e} at ({row}, {col})")]
    NotHermitian { row: usize, col: usize, deviation: f64 },
    #[error("input is not positive semidefinite: lambda_min = {lambda_min:e}")]
    NotPsd {
        lambda_min: f64,
        direction: Vec<num_complex::Complex64>,
    },
    #[error("integer overflow in exact arithmetic: {0}")]
    Overflow(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("no clear rank gap in rank profile {profile:?}")]
    DegenerateRank { profile: Vec<f64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
