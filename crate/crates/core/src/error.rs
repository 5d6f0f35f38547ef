use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("symmetry class violation: {0}")]
    ClassViolation(String),
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("degeneracy is not strict: {0}")]
    NotStrict(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("spectral gap closed: {0}")]
    GapClosed(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
