//! HTTP geometry service: lists loaded grids and serves camera-dependent
//! adaptive surfaces as flat numeric arrays.
//!
//! Grids are loaded once and shared read-only between requests.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use htg_core::adaptive::depth_cap;
use htg_core::io::load_grid;
use htg_core::{adaptive_surface, view_rect, Camera2D, HyperTreeGrid, ViewRect};

/// Version of the response schema.
pub const SCHEMA_VERSION: u32 = 1;

/// Immutable set of named grids.
#[derive(Default)]
pub struct Catalog {
    grids: BTreeMap<String, Arc<HyperTreeGrid>>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, grid: HyperTreeGrid) {
        self.grids.insert(name.into(), Arc::new(grid));
    }

    /// Loads every `*.json` file in `dir`, naming each grid after its file stem.
    pub fn load_dir(dir: &Path) -> htg_core::Result<Self> {
        let mut catalog = Self::new();
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.sort();
        for path in paths {
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            let grid = load_grid(&path).map_err(|e| match e {
                htg_core::Error::Parse(msg) => htg_core::Error::Parse(format!("{}: {msg}", path.display())),
                other => other,
            })?;
            catalog.insert(name, grid);
        }
        Ok(catalog)
    }

    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<HyperTreeGrid>> {
        self.grids.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub name: String,
    pub dimension: usize,
    pub factor: usize,
    pub root_extent: Vec<usize>,
    pub total_cells: usize,
    pub leaf_count: usize,
    pub bounds: Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Camera as sent by clients: window pixels, zoom, pixel threshold, view center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraParams {
    pub w: f64,
    pub h: f64,
    pub z: f64,
    pub s: f64,
    pub cx: f64,
    pub cy: f64,
}

impl From<CameraParams> for Camera2D {
    fn from(c: CameraParams) -> Self {
        Camera2D::new(c.w, c.h, c.z, c.s, [c.cx, c.cy])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRequest {
    pub camera: CameraParams,
    /// Per-quad scalar: a grid field, `depth` or `global_id`.
    #[serde(default = "default_color_by")]
    pub color_by: String,
}

fn default_color_by() -> String {
    "depth".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStats {
    pub quad_count: usize,
    pub depth_cap: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceResponse {
    pub version: u32,
    pub grid: String,
    pub color_by: String,
    pub view_rect: ViewRect,
    /// Interleaved `x, y` pairs.
    pub points: Vec<f64>,
    /// Four point indices per quad, counter-clockwise.
    pub quads: Vec<u32>,
    /// One scalar per quad.
    pub values: Vec<f64>,
    pub stats: SurfaceStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

/// Request failure rendered as `{"error": {"code", "message"}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }
}

impl From<htg_core::Error> for ApiError {
    fn from(e: htg_core::Error) -> Self {
        use htg_core::Error as E;
        match e {
            E::InvalidCamera(_) | E::NonPositiveArgument(_) => Self::new(StatusCode::BAD_REQUEST, "invalid_camera", e.to_string()),
            E::WrongDimension { .. } => Self::new(StatusCode::BAD_REQUEST, "unsupported_dimension", e.to_string()),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: ErrorDetail { code: self.code.into(), message: self.message } };
        (self.status, Json(body)).into_response()
    }
}

pub fn router(catalog: Arc<Catalog>) -> Router {
    Router::new()
        .route("/grids", get(list_grids))
        .route("/grids/{name}/surface", post(surface))
        .with_state(catalog)
}

fn grid_info(name: &str, grid: &HyperTreeGrid) -> GridInfo {
    let spec = grid.spec();
    let d = grid.dimension();
    let (lo, hi) = spec.bounds();
    GridInfo {
        name: name.to_string(),
        dimension: d,
        factor: grid.factor(),
        root_extent: spec.root_extent.clone(),
        total_cells: grid.total_cells(),
        leaf_count: grid.trees().iter().map(|t| t.leaf_count()).sum(),
        bounds: Bounds { min: lo[..d].to_vec(), max: hi[..d].to_vec() },
    }
}

async fn list_grids(State(catalog): State<Arc<Catalog>>) -> Json<Vec<GridInfo>> {
    Json(catalog.grids.iter().map(|(name, grid)| grid_info(name, grid)).collect())
}

async fn surface(
    State(catalog): State<Arc<Catalog>>,
    UrlPath(name): UrlPath<String>,
    body: Result<Json<SurfaceRequest>, JsonRejection>,
) -> Result<Json<SurfaceResponse>, ApiError> {
    let grid = catalog
        .get(&name)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "grid_not_found", format!("no grid named {name:?}")))?;
    let Json(request) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))?;
    tokio::task::spawn_blocking(move || compute_surface(&name, &grid, &request))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map(Json)
}

/// Runs the adaptive filter for one request.
pub fn compute_surface(name: &str, grid: &HyperTreeGrid, request: &SurfaceRequest) -> Result<SurfaceResponse, ApiError> {
    if grid.dimension() != 2 {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "unsupported_dimension",
            format!("grid {name:?} is {}D; only 2D grids are served", grid.dimension()),
        ));
    }
    let color_by = request.color_by.as_str();
    if !matches!(color_by, "depth" | "global_id") && grid.field(color_by).is_none() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "unknown_field", format!("grid {name:?} has no field {color_by:?}")));
    }
    let camera = Camera2D::from(request.camera);
    let rect = view_rect(&camera, grid)?;
    let cap = depth_cap(&camera, grid.factor())?;
    let start = Instant::now();
    let mesh = adaptive_surface(grid, &camera)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let values = mesh.cell_attributes.scalar(color_by).unwrap_or_default();
    Ok(SurfaceResponse {
        version: SCHEMA_VERSION,
        grid: name.to_string(),
        color_by: color_by.to_string(),
        view_rect: rect,
        points: mesh.points.iter().flat_map(|p| [p[0], p[1]]).collect(),
        quads: mesh.quads.iter().flatten().copied().collect(),
        values,
        stats: SurfaceStats { quad_count: mesh.quad_count(), depth_cap: cap, elapsed_ms },
    })
}
