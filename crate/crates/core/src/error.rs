use thiserror::Error;

/// Errors produced by the coding, channel and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {what} needs {needed} states, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: f64,
        limit: f64,
    },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("coordinate {0} is not a member of the petal")]
    NotInPetal(usize),

    #[error("channel output is inconsistent with every codeword")]
    ContradictoryEvidence,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn budget(what: &'static str, needed: f64, limit: f64) -> Self {
        Error::BudgetExceeded {
            what,
            needed,
            limit,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
