//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid quotient data: {0}")]
    InvalidQuotient(String),
    #[error("rank deficiency: {0}")]
    RankDeficient(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("{k} is not an eigenvalue: {detail}")]
    NotAnEigenvalue { k: f64, detail: String },
    #[error("transplant construction failed: {0}")]
    Transplant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
