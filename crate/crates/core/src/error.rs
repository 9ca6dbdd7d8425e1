use thiserror::Error;

/// Errors produced by the correlation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested distribution carries no integrable mass (e.g. a
    /// collapsed spread or |rho| = 1 for an elliptical family).
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    /// Quadrature or factorization failed to reach its target accuracy.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
