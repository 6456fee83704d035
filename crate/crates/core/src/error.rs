use thiserror::Error;

/// Errors raised by the polynomial and algebra routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wrong number of arguments: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("invalid character (multiplicative residual {multiplicative:e}, unital residual {unital:e})")]
    InvalidCharacter { multiplicative: f64, unital: f64 },

    #[error("degree-0 polynomials have no polarization")]
    NoPolarization,

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("point is not certified in the hull: {0}")]
    NotCertified(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
