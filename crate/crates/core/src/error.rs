use thiserror::Error;

use crate::logic::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unassigned input variable `{0}`")]
    Unassigned(VarId),
    #[error("{what}: {count} candidates exceed the ceiling of {ceiling}")]
    Ceiling { what: String, count: u128, ceiling: u64 },
    #[error("{what}: size {size} exceeds the oracle bound of {bound}")]
    OracleBound { what: String, size: usize, bound: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("external solver: {0}")]
    External(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
