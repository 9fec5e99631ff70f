use mushaf_querylab::{QueryState, ValidationReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WikiError {
    #[error("query {0} not found")]
    NotFound(String),
    #[error("not authorized: {0}")]
    NotAuthorized(String),
    #[error("wrong state: {action} is not allowed from {state:?}")]
    WrongState { action: &'static str, state: QueryState },
    #[error("validation failed: {0}")]
    Validation(ValidationReport),
    #[error("bad topic path: {0}")]
    BadTopicPath(String),
    #[error("documentation rejected: {0}")]
    Documentation(String),
    #[error("{0}")]
    Io(String),
    #[error("wiki store is inconsistent: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = WikiError> = std::result::Result<T, E>;
