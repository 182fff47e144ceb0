use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("enumeration of {size} elements exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("element level mismatch: expected {expected:?}, got {got:?}")]
    LevelMismatch { expected: crate::algebra::Level, got: crate::algebra::Level },
    #[error("cyclotomic operands over different primes ({0} vs {1})")]
    PrimeMismatch(u32, u32),
    #[error("trivial additive character (a ≡ 0 mod p)")]
    TrivialCharacter,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("non-integral coefficient: {0}")]
    NonIntegral(String),
    #[error("L-polynomial degree {got} below expected {expected}")]
    DegreeShortfall { expected: usize, got: usize },
    #[error("root finder did not converge for degree {0}")]
    NoConvergence(usize),
    #[error("window support violates the theorem hypothesis: {0}")]
    SupportViolation(String),
    #[error("zeros required for trace power r={0} >= d")]
    ZerosUnavailable(i64),
}
