use thiserror::Error;

use crate::statekit::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid state JSON: {0}")]
    Json(String),

    #[error("the zero state has no support")]
    ZeroState,

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCount { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitIndex { index: usize, qubits: usize },

    #[error("invalid local operator: {0}")]
    InvalidOperator(String),

    #[error("product of an empty factor list")]
    EmptyFactors,

    #[error("invalid flip specification: {0}")]
    InvalidFlip(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size guard exceeded: {what} is {value}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("state support does not match the monomial's columns")]
    SupportMismatch,

    #[error("zero amplitude at column {0} carries a negative exponent")]
    ZeroAtNegativeExponent(usize),

    #[error("integer {0} does not fit in 64 bits")]
    Overflow(String),
}
