use thiserror::Error;

use crate::locc::ValidationReport;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invariant violated: {invariant} (residual {residual:e})")]
    Invariant { invariant: &'static str, residual: f64 },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate dimension: {0}")]
    DegenerateDimension(String),

    #[error("not an isometry (max deviation of V^dag V from identity {0:e})")]
    NotIsometry(f64),

    #[error("invalid Kraus set (completeness residual {0:e})")]
    InvalidKraus(f64),

    #[error("invalid LOCC tree: {} issue(s)", .0.issues.len())]
    InvalidTree(ValidationReport),
}

pub type Result<T> = std::result::Result<T, Error>;
