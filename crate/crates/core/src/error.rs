use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bound {bound} too small to certify eventual periodicity")]
    BoundTooSmall { bound: usize },

    #[error("marker {0} is not an allowed block of the domain")]
    MarkerNotAllowed(String),

    #[error("domain is not irreducible")]
    NotIrreducible,

    #[error("code is not finite-to-one (graph diamond present)")]
    NotFiniteToOne,

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("gap set is empty")]
    EmptyGapSet,

    #[error("invalid W: {0}")]
    InvalidW(String),

    #[error("invalid spoke data: {0}")]
    InvalidSpoke(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
