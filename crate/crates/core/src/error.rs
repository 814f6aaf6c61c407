use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice dimensions {rows}x{cols}")]
    InvalidDimension { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} needs {requested} qubits, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("estimator undefined: {0}")]
    EstimatorUndefined(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("operator does not negate the Hamiltonian: {0}")]
    NotInvertible(String),

    #[error("malformed Pauli term: {0}")]
    MalformedTerm(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
