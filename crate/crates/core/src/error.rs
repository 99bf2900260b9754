use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation contains a directed cycle through `{0}`")]
    CycleDetected(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("size limit exceeded: {requested} elements requested, cap is {cap}")]
    SizeLimitExceeded { requested: usize, cap: usize },
    #[error("path endpoints do not match")]
    EndpointMismatch,
    #[error("search budget exceeded")]
    BudgetExceeded,
    #[error("map is not order preserving: {0}")]
    NotMonotone(String),
    #[error("not a simplicial map: {0}")]
    NotSimplicial(String),
    #[error("maps have different domains or codomains")]
    DomainMismatch,
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("candidates do not cover the universe")]
    Infeasible,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
