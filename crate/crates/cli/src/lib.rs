//! HTTP service and command implementations behind the `dbpareto` binary.

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dbpareto_core::{ApiError, Engine, ParetoRequest, SpiderRequest};
use serde::Deserialize;
use serde_json::json;

pub mod commands;

/// An [`ApiError`] rendered as `{"error": ..., "status": ...}`.
#[derive(Debug)]
pub struct HttpError(pub ApiError);

impl From<ApiError> for HttpError {
    fn from(e: ApiError) -> Self {
        HttpError(e)
    }
}

impl IntoResponse for HttpError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).unwrap_or(StatusCode::BAD_REQUEST);
        let body = json!({ "error": self.0.to_string(), "status": status.as_u16() });
        (status, Json(body)).into_response()
    }
}

fn bad_request(e: impl std::fmt::Display) -> HttpError {
    HttpError(ApiError::BadRequest(e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstancesQuery {
    pub protocol: Option<String>,
    pub offset: Option<usize>,
    pub limit: Option<usize>,
}

type Shared = State<Arc<Engine>>;

async fn protocols(State(engine): Shared) -> impl IntoResponse {
    Json(engine.protocols())
}

async fn instances(
    State(engine): Shared,
    query: Result<Query<InstancesQuery>, QueryRejection>,
) -> Result<impl IntoResponse, HttpError> {
    let Query(q) = query.map_err(bad_request)?;
    let page = engine.instance_page(q.protocol.as_deref(), q.offset.unwrap_or(0), q.limit)?;
    Ok(Json(page))
}

async fn instance(
    State(engine): Shared,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, HttpError> {
    Ok(Json(engine.instance(&id)?))
}

async fn pareto(
    State(engine): Shared,
    body: Result<Json<ParetoRequest>, JsonRejection>,
) -> Result<impl IntoResponse, HttpError> {
    let Json(req) = body.map_err(bad_request)?;
    let out = tokio::task::spawn_blocking(move || engine.pareto(&req))
        .await
        .map_err(|e| HttpError(ApiError::Unprocessable(e.to_string())))??;
    Ok(Json(out))
}

async fn spider(
    State(engine): Shared,
    body: Result<Json<SpiderRequest>, JsonRejection>,
) -> Result<impl IntoResponse, HttpError> {
    let Json(req) = body.map_err(bad_request)?;
    let svg = engine.spider(&req)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg))
}

async fn not_found() -> HttpError {
    HttpError(ApiError::NotFound("no such endpoint".into()))
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/protocols", get(protocols))
        .route("/api/instances", get(instances))
        .route("/api/instance/{id}", get(instance))
        .route("/api/pareto", post(pareto))
        .route("/api/chart/spider", post(spider))
        .fallback(not_found)
        .with_state(engine)
}

/// Compact JSON with object keys sorted, for byte comparison of outputs.
pub fn canonical_json(value: &serde_json::Value) -> String {
    serde_json::to_string(value).expect("value serializes")
}

pub async fn serve(engine: Arc<Engine>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
