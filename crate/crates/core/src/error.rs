use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value outside domain: {0}")]
    DomainError(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("density matrix validation failed: {0}")]
    ValidationFailure(String),

    #[error("channel '{0}' is not unital")]
    NotUnital(String),

    #[error("output entropy depends on the encoding (spread {spread:.3e} bits)")]
    CovarianceViolation { spread: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
