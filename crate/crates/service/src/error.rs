use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use dragrepo_core::engine::EngineError;
use dragrepo_core::repository::RepoError;
use dragrepo_core::transfer::TransferError;
use serde_json::json;

/// An error response: status plus `{"error": <name>, "message": <text>}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub name: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, name: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            name,
            message: message.into(),
        }
    }

    pub fn not_found(name: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, name, message)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.name, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

impl From<RepoError> for ApiError {
    fn from(e: RepoError) -> Self {
        let status = match e {
            RepoError::NameConflict(_) | RepoError::DragDisabled(_) => StatusCode::CONFLICT,
            RepoError::UnknownFolder(_) | RepoError::UnknownComponent(_) => StatusCode::NOT_FOUND,
            RepoError::InvalidName(_)
            | RepoError::EmptySelection
            | RepoError::MalformedInput(_) => StatusCode::BAD_REQUEST,
            RepoError::CorruptRepository { .. } | RepoError::IoFailure { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        ApiError::new(status, e.name(), e.to_string())
    }
}

impl From<TransferError> for ApiError {
    fn from(e: TransferError) -> Self {
        let status = match e {
            TransferError::MalformedEnvelope(_) => StatusCode::BAD_REQUEST,
            TransferError::UnsupportedFlavor(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            TransferError::FetchFailed(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.name(), e.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::SessionClosed => StatusCode::GONE,
            EngineError::ProtocolViolation(_) => StatusCode::CONFLICT,
        };
        ApiError::new(status, e.name(), e.to_string())
    }
}
