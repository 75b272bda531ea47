use thiserror::Error;

/// Errors produced by key generation, the codec, and the analysis tools.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("base is not invertible modulo {0}")]
    NotInvertible(String),

    #[error("element {0} is not a unit in (1, M)")]
    InvalidElement(String),

    #[error("factorization of M - 1 is not available")]
    MissingFactorization,

    #[error("modulus search failed: {0}")]
    ModulusSearch(String),

    #[error("coprime pool exhausted: need {needed} elements, pool holds {available}")]
    PoolExhausted { needed: usize, available: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("plaintext must be nonzero")]
    ZeroPlaintext,

    #[error("bit string has odd length {0}")]
    OddLength(usize),

    #[error("expected length {expected}, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("padded pair string has {zero_pairs} 00-pairs, limit is {limit}")]
    TooManyZeroPairs { zero_pairs: usize, limit: usize },

    #[error("not a ciphertext: no candidate factored within |k| <= {bound}")]
    NotACiphertext { bound: u64 },

    #[error("discrete log unavailable: {0}")]
    Dlog(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
