use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("commutator needs at least one argument")]
    EmptyCommutator,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message} (expected one of: {})", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lattice is not contained in the ambient lattice (basis row {row} is not a member)")]
    NotContained { row: usize, witness: Vec<BigInt> },
    #[error("malformed matrix text: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("unknown ideal spec `{0}`")]
    UnknownSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("custom generator `{0}` is not multilinear")]
    NonMultilinearSchema(String),
    #[error("polynomial is not multihomogeneous of multidegree {0}")]
    WrongComponent(String),
    #[error("custom generator file: {0}")]
    SpecFile(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum ClaimError {
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}
