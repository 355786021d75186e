//! HTTP service and shared helpers for the `gtree` command.
//!
//! Routes, all read-only:
//!
//! - `GET /api/v1/health`
//! - `GET /api/v1/trajectory/{n}`
//! - `GET /api/v1/region?seed=&max_value=&max_gen=&format=`
//!
//! Anything else falls through to the static asset directory, if one was given.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use gtree_core::collatz::{trajectory, CollatzError, CollatzValue, Trajectory};
use gtree_core::region::{
    render_region, ErrorClass, RegionError, RegionFormat, RegionLimits, RegionRequest,
    RenderedRegion,
};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryBody {
    pub start: u64,
    /// Every iterate from `start` down to 1 inclusive.
    pub steps: Vec<u64>,
    pub length: u64,
    pub peak: u64,
}

impl From<&Trajectory> for TrajectoryBody {
    fn from(t: &Trajectory) -> Self {
        TrajectoryBody {
            start: t.start().get(),
            steps: t.values().collect(),
            length: t.length(),
            peak: t.peak().get(),
        }
    }
}

/// Plain-text form used by the CLI: the iterates on one line, then length
/// and peak.
pub fn trajectory_text(t: &Trajectory) -> String {
    let values: Vec<String> = t.values().map(|v| v.to_string()).collect();
    format!(
        "{}\nlength: {}\npeak: {}\n",
        values.join(" "),
        t.length(),
        t.peak()
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

fn error_response(status: StatusCode, reason: &str, message: String) -> Response {
    (
        status,
        Json(ErrorBody {
            error: reason.to_string(),
            message,
        }),
    )
        .into_response()
}

fn region_error_response(e: &RegionError) -> Response {
    let status = match e.class() {
        ErrorClass::Invalid => StatusCode::BAD_REQUEST,
        ErrorClass::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
    };
    error_response(status, e.reason(), e.to_string())
}

/// Rendered regions keyed by the full request. Dropped wholesale when full;
/// entries never change, so a hit is byte-identical to a recomputation.
#[derive(Debug)]
pub struct RegionCache {
    entries: RwLock<HashMap<RegionRequest, Arc<RenderedRegion>>>,
    max_entries: usize,
    max_body_bytes: usize,
}

impl RegionCache {
    pub fn new(max_entries: usize, max_body_bytes: usize) -> RegionCache {
        RegionCache {
            entries: RwLock::new(HashMap::new()),
            max_entries,
            max_body_bytes,
        }
    }

    pub fn get(&self, req: &RegionRequest) -> Option<Arc<RenderedRegion>> {
        self.entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(req)
            .cloned()
    }

    pub fn insert(&self, req: RegionRequest, doc: Arc<RenderedRegion>) {
        if self.max_entries == 0 || doc.body.len() > self.max_body_bytes {
            return;
        }
        let mut entries = self.entries.write().unwrap_or_else(|e| e.into_inner());
        if entries.len() >= self.max_entries {
            entries.clear();
        }
        entries.insert(req, doc);
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for RegionCache {
    fn default() -> Self {
        RegionCache::new(64, 8 << 20)
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub assets: Option<PathBuf>,
    pub limits: RegionLimits,
    pub cache_entries: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            assets: None,
            limits: RegionLimits::SERVICE,
            cache_entries: 64,
        }
    }
}

#[derive(Debug)]
struct AppState {
    limits: RegionLimits,
    cache: RegionCache,
}

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState {
        limits: config.limits,
        cache: RegionCache::new(config.cache_entries, 8 << 20),
    });
    let api = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/trajectory/{n}", get(trajectory_handler))
        .route("/api/v1/region", get(region_handler))
        .with_state(state);
    match config.assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async {
            error_response(
                StatusCode::NOT_FOUND,
                "not_found",
                "no such resource".to_string(),
            )
        }),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

async fn trajectory_handler(Path(n): Path<String>) -> Response {
    let start: CollatzValue = match n.parse() {
        Ok(v) => v,
        Err(e) => {
            return error_response(
                StatusCode::BAD_REQUEST,
                "invalid_parameter",
                format!("n: {e}"),
            )
        }
    };
    let result = tokio::task::spawn_blocking(move || trajectory(start)).await;
    match result {
        Ok(Ok(t)) => Json(TrajectoryBody::from(&t)).into_response(),
        Ok(Err(e)) => {
            let reason = match e {
                CollatzError::Overflow { .. } => "overflow",
                CollatzError::IterationCap { .. } => "iteration_cap",
                CollatzError::Zero | CollatzError::Parse(_) => "invalid_parameter",
            };
            error_response(StatusCode::UNPROCESSABLE_ENTITY, reason, e.to_string())
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}

/// Query parameters to a [`RegionRequest`]; the error names the bad parameter.
pub fn parse_region_query(params: &HashMap<String, String>) -> Result<RegionRequest, String> {
    fn number<T: std::str::FromStr>(
        params: &HashMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, String> {
        match params.get(key).map(|s| s.trim()) {
            None | Some("") => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("{key}: expected a non-negative integer, got {s:?}")),
        }
    }
    let max_value =
        number::<u64>(params, "max_value")?.ok_or_else(|| "max_value: required".to_string())?;
    let format = match params.get("format").map(|s| s.trim()) {
        None | Some("") => RegionFormat::default(),
        Some(s) => s.parse().map_err(|e| format!("format: {e}"))?,
    };
    Ok(RegionRequest {
        seed: number(params, "seed")?.unwrap_or(1),
        max_value,
        max_generation: number(params, "max_gen")?,
        format,
    })
}

async fn region_handler(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let req = match parse_region_query(&params) {
        Ok(r) => r,
        Err(msg) => return error_response(StatusCode::BAD_REQUEST, "invalid_parameter", msg),
    };
    let doc = match state.cache.get(&req) {
        Some(doc) => doc,
        None => {
            let limits = state.limits;
            let rendered = tokio::task::spawn_blocking(move || render_region(&req, &limits)).await;
            match rendered {
                Ok(Ok(doc)) => {
                    let doc = Arc::new(doc);
                    state.cache.insert(req, Arc::clone(&doc));
                    doc
                }
                Ok(Err(e)) => return region_error_response(&e),
                Err(e) => {
                    return error_response(
                        StatusCode::INTERNAL_SERVER_ERROR,
                        "internal",
                        e.to_string(),
                    )
                }
            }
        }
    };
    ([(header::CONTENT_TYPE, doc.media_type)], doc.body.clone()).into_response()
}
