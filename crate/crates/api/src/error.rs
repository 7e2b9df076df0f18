use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};
use taas_core::Error;

/// Error body `{code, message, details}` with its HTTP status.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", message)
    }

    /// Same response for unknown emails and wrong passwords.
    pub fn invalid_credentials() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "invalid_credentials", "invalid email or password")
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn route_not_found() -> Self {
        Self::new(StatusCode::NOT_FOUND, "route_not_found", "no such route")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::Validation { .. } | Error::UnknownVariant { .. } | Error::Parse { .. } => {
                StatusCode::BAD_REQUEST
            }
            Error::NotFound { .. } => StatusCode::NOT_FOUND,
            Error::NameConflict(_)
            | Error::DuplicateName { .. }
            | Error::VersionConflict { .. }
            | Error::StaleLayout { .. }
            | Error::StaleMatrix { .. } => StatusCode::CONFLICT,
            Error::SelfLoop
            | Error::DuplicateRelation { .. }
            | Error::HierarchyCycle { .. }
            | Error::NotDescendant { .. }
            | Error::UndefinedBaseline => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Builder(_) | Error::Io(_) | Error::Json(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let details = match &err {
            Error::Validation { field, .. } => json!({ "field": field }),
            Error::NotFound { kind, id } => json!({ "kind": kind, "id": id }),
            Error::DuplicateName { kind, name } => json!({ "kind": kind, "name": name }),
            Error::DuplicateRelation { source_id, target } => {
                json!({ "source_id": source_id, "target_id": target })
            }
            Error::HierarchyCycle { path } => json!({ "path": path }),
            Error::VersionConflict { expected, actual } => {
                json!({ "expected": expected, "actual": actual })
            }
            Error::StaleLayout { ids } => json!({ "ids": ids }),
            Error::StaleMatrix { matrix, taxonomy } => json!({ "matrix": matrix, "taxonomy": taxonomy }),
            Error::Parse { line, column, .. } => json!({ "line": line, "column": column }),
            Error::UnknownVariant { kind, value } => json!({ "kind": kind, "value": value }),
            _ => Value::Null,
        };
        Self {
            status,
            code: err.code(),
            message: err.to_string(),
            details,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "code": self.code,
            "message": self.message,
            "details": self.details,
        });
        (self.status, Json(body)).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
