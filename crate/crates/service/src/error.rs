use axum::Json;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use mushaf_querylab::QueryError;
use mushaf_wiki::WikiError;
use serde::Serialize;
use serde_json::{Value, json};

/// Error body for every endpoint: `{code, message, detail}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::FORBIDDEN, "forbidden", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<mushaf_core::Error> for ApiError {
    fn from(e: mushaf_core::Error) -> Self {
        use mushaf_core::Error::*;
        let msg = e.to_string();
        match e {
            OutOfRange { .. } => ApiError::new(StatusCode::NOT_FOUND, "out_of_range", msg),
            UnknownAyah { .. } | UnknownAnchor { .. } => ApiError::not_found(msg),
            InvalidSelection(_) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_selection", msg),
            _ => ApiError::internal(msg),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let msg = e.to_string();
        match e {
            QueryError::Invalid(report) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", msg)
                .with_detail(serde_json::to_value(report).unwrap_or_default()),
            QueryError::UnknownParameter(_) | QueryError::NotInteger { .. } | QueryError::MissingValue(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "invalid_binding", msg)
            }
            QueryError::Timeout { limit_ms } => {
                ApiError::new(StatusCode::REQUEST_TIMEOUT, "timeout", msg).with_detail(json!({ "limit_ms": limit_ms }))
            }
            QueryError::Sql { offset, .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, "sql_error", msg).with_detail(json!({ "offset": offset }))
            }
            QueryError::NullLinkValue => ApiError::new(StatusCode::BAD_REQUEST, "null_link_value", msg),
            QueryError::UnknownHyperlink(_) => ApiError::not_found(msg),
            QueryError::NotSubquery(_) | QueryError::NoDetail | QueryError::BadLinkValue(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "bad_link", msg)
            }
            QueryError::Io(_) => ApiError::internal(msg),
        }
    }
}

impl From<WikiError> for ApiError {
    fn from(e: WikiError) -> Self {
        let msg = e.to_string();
        match e {
            WikiError::NotFound(_) => ApiError::not_found(msg),
            WikiError::NotAuthorized(_) => ApiError::forbidden(msg),
            WikiError::WrongState { .. } => ApiError::new(StatusCode::CONFLICT, "wrong_state", msg),
            WikiError::Validation(report) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", msg)
                .with_detail(serde_json::to_value(report).unwrap_or_default()),
            WikiError::BadTopicPath(_) => ApiError::new(StatusCode::BAD_REQUEST, "bad_topic_path", msg),
            WikiError::Documentation(_) => ApiError::new(StatusCode::BAD_REQUEST, "bad_documentation", msg),
            WikiError::Io(_) | WikiError::Inconsistent(_) => ApiError::internal(msg),
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
