use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid precision configuration: {0}")]
    InvalidPrecision(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("matrix is not hermitian (asymmetry {0})")]
    NotHermitian(String),
    #[error("matrix is not positive semidefinite (minimum eigenvalue {0})")]
    NotPsd(String),
    #[error("matrix is not positive definite (minimum eigenvalue {0})")]
    NotPositiveDefinite(String),
    #[error("matrix is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("values are not sorted in descending order")]
    Unsorted,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate candidate: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
