//! Read-only HTTP service over a generated dataset.
//!
//! ```text
//! GET  /healthz
//! GET  /scenes                              ["scene id", ...]
//! GET  /scenes/{id}                         {"scene_id", "regions"}
//! GET  /scenes/{id}/regions/{rid}/graph     graph document
//! POST /ground {"scene_id", "region_id", "statement"}
//! ```

use std::net::SocketAddr;
use std::sync::Arc;

use anyhow::{Context, Result};
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dataset::Dataset;
use crate::ground::{Grounder, Grounding};

pub struct AppState {
    pub dataset: Dataset,
    pub grounder: Grounder,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundRequest {
    pub scene_id: String,
    pub region_id: String,
    pub statement: String,
}

#[derive(Debug, Serialize)]
pub struct AlternativeView {
    pub statement: String,
    pub object_id: String,
    pub score: f64,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route(
            "/healthz",
            get(|| async { Json(json!({ "status": "ok" })) }),
        )
        .route("/scenes", get(list_scenes))
        .route("/scenes/{id}", get(scene))
        .route("/scenes/{id}/regions/{rid}/graph", get(graph))
        .route("/ground", post(ground))
        .with_state(state)
}

async fn list_scenes(State(state): State<Arc<AppState>>) -> Json<Vec<String>> {
    Json(
        state
            .dataset
            .manifest
            .scenes
            .iter()
            .map(|s| s.scene_id.clone())
            .collect(),
    )
}

async fn scene(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    match state
        .dataset
        .manifest
        .scenes
        .iter()
        .find(|s| s.scene_id == id)
    {
        Some(s) => Json(s).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("unknown scene '{id}'")),
    }
}

async fn graph(
    State(state): State<Arc<AppState>>,
    UrlPath((id, rid)): UrlPath<(String, String)>,
) -> Response {
    match state.dataset.graph(&id, &rid) {
        Some(g) => Json(g.to_document()).into_response(),
        None => error(
            StatusCode::NOT_FOUND,
            format!("unknown scene/region '{id}/{rid}'"),
        ),
    }
}

pub fn grounding_body(g: &Grounding) -> Value {
    let view = |c: &refground_core::grounding::AlternativeCandidate| AlternativeView {
        statement: c.statement.clone(),
        object_id: c.target.clone(),
        score: c.score.value,
    };
    let mut body = json!({
        "exists": g.exists,
        "query": g.parse.query,
        "confidence": g.parse.confidence,
        "diagnostics": g.parse.diagnostics,
    });
    if g.exists {
        body["object_id"] = json!(g.object_id);
        body["anchor_ids"] = json!(g.anchor_ids);
    } else {
        body["alternatives"] = json!(g.alternatives.iter().map(view).collect::<Vec<_>>());
        body["selected"] = json!(g.selected.as_ref().map(view));
    }
    body
}

async fn ground(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let request: GroundRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")),
    };
    let task = tokio::task::spawn_blocking(move || {
        let Some(graph) = state.dataset.graph(&request.scene_id, &request.region_id) else {
            return error(
                StatusCode::NOT_FOUND,
                format!(
                    "unknown scene/region '{}/{}'",
                    request.scene_id, request.region_id
                ),
            );
        };
        match state.grounder.ground(graph, &request.statement) {
            Ok(g) => Json(grounding_body(&g)).into_response(),
            Err(e) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": e.message, "kind": e.kind, "diagnostics": e.diagnostics })),
            )
                .into_response(),
        }
    });
    match task.await {
        Ok(response) => response,
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

/// Serves until the process is stopped.
pub fn cmd_serve(dataset: Dataset, addr: SocketAddr, grounder: Grounder) -> Result<()> {
    let state = Arc::new(AppState { dataset, grounder });
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        log::info!("serving on http://{}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        Ok(())
    })
}
