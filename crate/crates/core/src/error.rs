use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain mismatch: expected {expected}, got {got}")]
    DomainMismatch { expected: String, got: String },

    #[error("enumeration limit exceeded: {what} requires {limit}, got {actual}")]
    TooLarge {
        what: &'static str,
        limit: String,
        actual: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown table entry: {0}")]
    UnknownEntry(String),

    #[error("no feasible level set among the thresholds of the point")]
    NoFeasibleLevel,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inner solver failure: {0}")]
    InnerSolve(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn too_large(what: &'static str, limit: impl ToString, actual: impl ToString) -> Error {
    Error::TooLarge {
        what,
        limit: limit.to_string(),
        actual: actual.to_string(),
    }
}
