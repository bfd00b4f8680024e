//! HTTP routes over a [`Store`].

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lightor_core::extractor::InteractionEvent;
use lightor_core::{parse_chat_log, ModelFile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::store::{Diagnostic, RedDotView, Store, StoreError};

/// Body of `POST /videos`. The chat log comes either from a file the
/// server can read or inline, in the chat log line format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chat_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chat_log: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterResponse {
    pub video_id: String,
    pub length_s: f64,
    pub red_dots: Vec<RedDotView>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Accepted {
    pub accepted: usize,
}

pub struct ApiError(StoreError);

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::Conflict(_) => StatusCode::CONFLICT,
            StoreError::Invalid { .. } => StatusCode::BAD_REQUEST,
            StoreError::MissingModel(_) => StatusCode::UNPROCESSABLE_ENTITY,
            StoreError::Core(lightor_core::Error::Io(_)) => StatusCode::INTERNAL_SERVER_ERROR,
            StoreError::Core(_) => StatusCode::BAD_REQUEST,
            StoreError::Io(_) | StoreError::Json(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        let body = match &self.0 {
            StoreError::Invalid { message, diagnostics } => json!({ "error": message, "diagnostics": diagnostics }),
            e => json!({ "error": e.to_string() }),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, StoreError> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| StoreError::Io(std::io::Error::other(e)))?
        .map_err(ApiError)
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/videos", post(register))
        .route("/videos/{id}", get(record))
        .route("/videos/{id}/reddots", get(red_dots))
        .route("/videos/{id}/interactions", post(interactions))
        .route("/videos/{id}/refine", post(refine))
        .with_state(store)
}

async fn register(State(store): State<Arc<Store>>, Json(req): Json<RegisterRequest>) -> ApiResult<(StatusCode, Json<RegisterResponse>)> {
    let out = blocking(move || {
        let chat = match (&req.chat_path, &req.chat_log) {
            (Some(path), None) => parse_chat_log(std::fs::File::open(path)?, &req.video_id)?,
            (None, Some(text)) => parse_chat_log(text.as_bytes(), &req.video_id)?,
            _ => {
                return Err(StoreError::Invalid {
                    message: "give exactly one of chat_path and chat_log".into(),
                    diagnostics: Vec::new(),
                })
            }
        };
        let model = req.model_path.as_deref().map(ModelFile::load).transpose()?;
        let record = store.register(&req.video_id, chat, model)?;
        Ok(RegisterResponse {
            video_id: record.meta.video_id.clone(),
            length_s: record.meta.length_s,
            red_dots: record.red_dots.iter().map(RedDotView::from).collect(),
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(out)))
}

async fn record(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || store.record(&id)).await?))
}

async fn red_dots(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || store.red_dots(&id)).await?))
}

/// Parses the batch record by record so a schema error names its index.
fn parse_batch(body: &[u8]) -> Result<Vec<InteractionEvent>, StoreError> {
    let invalid = |message: String, diagnostics| StoreError::Invalid { message, diagnostics };
    let items: Vec<serde_json::Value> =
        serde_json::from_slice(body).map_err(|e| invalid(format!("body must be a JSON array of events: {e}"), Vec::new()))?;
    let mut events = Vec::with_capacity(items.len());
    let mut diagnostics = Vec::new();
    for (index, item) in items.into_iter().enumerate() {
        match serde_json::from_value(item) {
            Ok(e) => events.push(e),
            Err(e) => diagnostics.push(Diagnostic {
                index,
                message: e.to_string(),
            }),
        }
    }
    if diagnostics.is_empty() {
        Ok(events)
    } else {
        Err(invalid(format!("{} records do not match the event schema", diagnostics.len()), diagnostics))
    }
}

async fn interactions(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Accepted>> {
    let accepted = blocking(move || {
        let batch = parse_batch(&body)?;
        store.append(&id, batch)
    })
    .await?;
    Ok(Json(Accepted { accepted }))
}

async fn refine(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || store.refine(&id)).await?))
}
