use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("no primitive root of order {r} modulo {p}")]
    NoRoot { p: u64, r: u64 },
    #[error("no admissible prime below 2^63")]
    NoAdmissiblePrime,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("moduli are not pairwise coprime")]
    NotCoprime,
    #[error("residue and prime lists differ in length")]
    ResidueMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tensors live in different fields")]
    FieldMismatch,
    #[error("order mismatch: {0}")]
    Order(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid tree decomposition: {0}")]
    InvalidTd(String),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("graph too large for exhaustive search: {0} vertices")]
    TooLarge(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
