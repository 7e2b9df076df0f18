pub mod account;
pub mod editing;
pub mod experiments;
pub mod review;
pub mod views;

use std::sync::Arc;

use axum::http::{header, HeaderMap, HeaderValue};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::json;
use taas_core::{Taxonomy, TaxonomyId};

use crate::auth::User;
use crate::error::{ApiError, ApiResult};
use crate::AppState;

pub const VERSION_HEADER: &str = "x-taxonomy-version";
pub const CACHE_HEADER: &str = "x-cache";

/// Authenticated user of the current request, if any.
#[derive(Clone, Debug)]
pub struct Caller(pub Option<User>);

impl Caller {
    pub fn user(&self) -> ApiResult<&User> {
        self.0
            .as_ref()
            .ok_or_else(|| ApiError::unauthorized("authentication required"))
    }
}

/// Optimistic-concurrency token sent by editors.
pub fn expected_version(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    match headers.get(VERSION_HEADER) {
        None => Ok(None),
        Some(value) => value
            .to_str()
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Some)
            .ok_or_else(|| ApiError::bad_request("validation", "X-Taxonomy-Version must be an integer")),
    }
}

/// Snapshot of a taxonomy the caller may read. Anonymous callers only see
/// public taxonomies.
pub fn readable(state: &AppState, caller: &Caller, id: &str) -> ApiResult<Arc<Taxonomy>> {
    let found = state.workspace.get(&TaxonomyId::from(id));
    match (&caller.0, found) {
        (Some(_), found) => Ok(found?),
        (None, Ok(tax)) if tax.is_public() => Ok(tax),
        (None, _) => Err(ApiError::unauthorized("authentication required")),
    }
}

pub fn with_version(mut response: Response, version: u64) -> Response {
    response
        .headers_mut()
        .insert(VERSION_HEADER, HeaderValue::from(version));
    response
}

/// Runs `change` against the taxonomy and answers `{version, data}`.
pub fn mutate<R: Serialize>(
    state: &AppState,
    headers: &HeaderMap,
    id: &str,
    change: impl FnOnce(&mut Taxonomy) -> taas_core::Result<R>,
) -> ApiResult<Response> {
    let id = TaxonomyId::from(id);
    let (result, tax) = state
        .workspace
        .mutate(&id, expected_version(headers)?, change)?;
    let body = json!({ "version": tax.version(), "data": result });
    Ok(with_version(Json(body).into_response(), tax.version()))
}

/// Whether the client asked for CSV via `?format=csv` or the Accept header.
pub fn wants_csv(headers: &HeaderMap, format: Option<&str>) -> ApiResult<bool> {
    match format {
        Some(f) if f.eq_ignore_ascii_case("csv") => return Ok(true),
        Some(f) if f.eq_ignore_ascii_case("json") => return Ok(false),
        Some(other) => {
            return Err(ApiError::bad_request(
                "validation",
                format!("unsupported format {other:?}; use json or csv"),
            ))
        }
        None => {}
    }
    let accept = headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    Ok(accept.contains("text/csv") && !accept.contains("application/json"))
}

pub fn csv(text: String) -> Response {
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], text).into_response()
}
