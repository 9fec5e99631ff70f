use thiserror::Error;

use crate::validate::ValidationReport;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("{0}")]
    Io(String),
    #[error("sql error: {message}{}", .offset.map(|o| format!(" (at byte {o})")).unwrap_or_default())]
    Sql { message: String, offset: Option<usize> },
    #[error("query exceeded the {limit_ms} ms time limit")]
    Timeout { limit_ms: u128 },
    #[error("query failed validation: {0}")]
    Invalid(ValidationReport),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("parameter {name} expects an integer, got {value:?}")]
    NotInteger { name: String, value: String },
    #[error("parameter {0} has no value and no default")]
    MissingValue(String),
    #[error("unknown hyperlink {0}")]
    UnknownHyperlink(String),
    #[error("hyperlink {0} is not a Subquery link")]
    NotSubquery(String),
    #[error("query has no detail sql")]
    NoDetail,
    #[error("null link value")]
    NullLinkValue,
    #[error("link value {0} is not an ayah serial number")]
    BadLinkValue(String),
}

impl From<rusqlite::Error> for QueryError {
    fn from(e: rusqlite::Error) -> Self {
        match e {
            rusqlite::Error::SqlInputError { msg, offset, .. } => QueryError::Sql {
                message: msg,
                offset: usize::try_from(offset).ok(),
            },
            rusqlite::Error::SqliteFailure(_, Some(msg)) => QueryError::Sql { message: msg, offset: None },
            other => QueryError::Sql {
                message: other.to_string(),
                offset: None,
            },
        }
    }
}

pub type Result<T, E = QueryError> = std::result::Result<T, E>;
