use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("Y must exceed 1/3, got {0}")]
    YTooSmall(String),

    /// The search box holds no nonzero admissible lattice vector.
    #[error("no admissible lattice vector in the search box (the Minkowski bound may not hold)")]
    NotFound,

    /// Admissible vectors exist but all have b1 = 0. Cannot happen when Y > 1/3.
    #[error("every admissible lattice vector has b1 = 0")]
    DegenerateB1,

    #[error("search space too large: about {estimate:.3e} candidates, limit {limit:.0e}")]
    SearchTooLarge { estimate: f64, limit: f64 },

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: BigInt, modulus: BigInt },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("empty parameter set: {0}")]
    EmptyParameterSet(String),

    #[error("cannot factor {0}: outside the supported range")]
    Factorization(BigInt),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
