use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::IntoResponse;
use axum::{Extension, Json};
use serde::Deserialize;
use serde_json::{json, Value};

use super::Caller;
use crate::auth::{IssuedToken, User};
use crate::error::{ApiError, ApiResult};
use crate::extract::Body;
use crate::AppState;

#[derive(Deserialize)]
pub struct Credentials {
    email: String,
    password: String,
}

pub async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

pub async fn register(
    State(state): State<AppState>,
    Body(creds): Body<Credentials>,
) -> ApiResult<impl IntoResponse> {
    let auth = state.clone();
    let user = tokio::task::spawn_blocking(move || auth.auth.register(&creds.email, &creds.password))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(user)))
}

pub async fn login(
    State(state): State<AppState>,
    Body(creds): Body<Credentials>,
) -> ApiResult<Json<IssuedToken>> {
    let token = tokio::task::spawn_blocking(move || state.auth.login(&creds.email, &creds.password))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(token))
}

pub async fn logout(State(state): State<AppState>, headers: HeaderMap) -> StatusCode {
    let token = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim);
    if let Some(token) = token {
        state.auth.logout(token);
    }
    StatusCode::NO_CONTENT
}

pub async fn me(Extension(caller): Extension<Caller>) -> ApiResult<Json<User>> {
    Ok(Json(caller.user()?.clone()))
}
