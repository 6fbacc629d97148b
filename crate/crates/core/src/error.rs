use thiserror::Error;

/// Errors raised by the algebra, protocol and attack layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operands live in different rings: {0}")]
    Incompatible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is not in the image of the embedding: {0}")]
    NotInImage(String),
    #[error("group closure exceeds the order cap of {cap}")]
    GroupTooLarge { cap: usize },
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("parameter generation failed: {0}")]
    Generation(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
