//! View-dependent 2D surface extraction.
//!
//! Under a parallel projection the filter skips every cell whose box misses
//! the visible rectangle, and stops descending at the depth where cells
//! shrink below the pixel threshold:
//!
//! ```text
//! max_depth(w, z, s, f) = (ln(w·z) − ln s) / ln f
//! ```
//!
//! The traversal emits cells at `depth_cap = max(0, ⌊max_depth⌋)` as single
//! quads, using the coarse cell's own attributes. 3D grids fall back to the
//! full outer surface.

use serde::{Deserialize, Serialize};

use crate::cursor::GeometricCursor;
use crate::geometry::{extract_surface_2d, extract_surface_3d, rect_corners, require_dimension};
use crate::grid::HyperTreeGrid;
use crate::mesh::{PolyMesh, PolyMeshBuilder};
use crate::{Error, Result};

/// Parallel-projection camera looking down on a 2D grid.
///
/// `zoom = 1` fits the grid's full x-extent into `window_w` pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Camera2D {
    pub window_w: f64,
    pub window_h: f64,
    pub center: [f64; 2],
    pub zoom: f64,
    /// Minimum on-screen cell extent, in pixels, before descent stops.
    pub scale_threshold: f64,
}

impl Camera2D {
    pub fn new(window_w: f64, window_h: f64, zoom: f64, scale_threshold: f64, center: [f64; 2]) -> Self {
        Self { window_w, window_h, center, zoom, scale_threshold }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.window_w, self.window_h, self.zoom, self.scale_threshold, self.center[0], self.center[1]]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidCamera("non-finite parameter".into()));
        }
        if self.window_w < 1.0 || self.window_h < 1.0 {
            return Err(Error::InvalidCamera(format!("window {}x{} smaller than 1 pixel", self.window_w, self.window_h)));
        }
        if self.zoom <= 0.0 {
            return Err(Error::InvalidCamera(format!("zoom {} must be positive", self.zoom)));
        }
        if self.scale_threshold <= 0.0 {
            return Err(Error::InvalidCamera(format!("scale threshold {} must be positive", self.scale_threshold)));
        }
        Ok(())
    }

    /// A camera whose view rectangle covers the whole grid at `zoom = 1`.
    pub fn fit(grid: &HyperTreeGrid, window_w: f64, window_h: f64, scale_threshold: f64) -> Self {
        let (lo, hi) = grid.spec().bounds();
        let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        // Grow the window height until the y-extent fits too.
        let x_extent = hi[0] - lo[0];
        let needed_h = window_w * (hi[1] - lo[1]) / x_extent;
        Self::new(window_w, window_h.max(needed_h.ceil()), 1.0, scale_threshold, center)
    }
}

/// Axis-aligned visible rectangle in world units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewRect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl ViewRect {
    /// Closed-set intersection with the box `[lo, hi]`.
    #[inline]
    pub fn intersects(&self, lo: [f64; 3], hi: [f64; 3]) -> bool {
        lo[0] <= self.max[0] && hi[0] >= self.min[0] && lo[1] <= self.max[1] && hi[1] >= self.min[1]
    }

    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }
}

/// Deepest depth worth descending to: `(ln(w·z) − ln s) / ln f`.
pub fn max_depth(window: f64, zoom: f64, scale: f64, factor: usize) -> Result<f64> {
    if !(window * zoom > 0.0) {
        return Err(Error::NonPositiveArgument("window × zoom"));
    }
    if !(scale > 0.0) {
        return Err(Error::NonPositiveArgument("scale"));
    }
    if factor < 2 {
        return Err(Error::BadFactor(factor));
    }
    Ok(((window * zoom).ln() - scale.ln()) / (factor as f64).ln())
}

/// Truncation depth actually used by the traversal: `max(0, ⌊max_depth⌋)`.
pub fn depth_cap(camera: &Camera2D, factor: usize) -> Result<usize> {
    let d = max_depth(camera.window_w, camera.zoom, camera.scale_threshold, factor)?;
    Ok(d.floor().clamp(0.0, u32::MAX as f64) as usize)
}

pub fn view_rect(camera: &Camera2D, grid: &HyperTreeGrid) -> Result<ViewRect> {
    require_dimension(grid, 2)?;
    camera.validate()?;
    let (lo, hi) = grid.spec().bounds();
    let pixels_per_unit = camera.window_w * camera.zoom / (hi[0] - lo[0]);
    let half = [camera.window_w / (2.0 * pixels_per_unit), camera.window_h / (2.0 * pixels_per_unit)];
    Ok(ViewRect {
        min: [camera.center[0] - half[0], camera.center[1] - half[1]],
        max: [camera.center[0] + half[0], camera.center[1] + half[1]],
    })
}

/// Camera-dependent surface. 3D grids return [`extract_surface_3d`] unchanged.
pub fn adaptive_surface(grid: &HyperTreeGrid, camera: &Camera2D) -> Result<PolyMesh> {
    if grid.dimension() == 3 {
        return extract_surface_3d(grid);
    }
    let rect = view_rect(camera, grid)?;
    let cap = depth_cap(camera, grid.factor())?;
    Ok(culled_surface(grid, &rect, cap))
}

/// Depth-first extraction restricted to `rect` and truncated at `cap`.
pub fn culled_surface(grid: &HyperTreeGrid, rect: &ViewRect, cap: usize) -> PolyMesh {
    fn visit(c: &GeometricCursor, rect: &ViewRect, cap: usize, out: &mut PolyMeshBuilder) {
        if c.is_masked() || !rect.intersects(c.origin(), c.upper()) {
            return;
        }
        if c.is_leaf() || c.depth() >= cap {
            out.push_quad(rect_corners(c.origin(), c.upper(), 0.0), c.global_id(), c.depth());
            return;
        }
        for child in c.children() {
            visit(&child, rect, cap, out);
        }
    }
    let mut out = PolyMeshBuilder::new(grid);
    for t in 0..grid.tree_count() {
        let root = GeometricCursor::root(grid, t).expect("tree index in range");
        visit(&root, rect, cap, &mut out);
    }
    out.finish()
}

/// Adaptive surface when a camera is given, the full surface otherwise.
pub fn surface_for_camera_or_full(grid: &HyperTreeGrid, camera: Option<&Camera2D>) -> Result<PolyMesh> {
    match (camera, grid.dimension()) {
        (Some(cam), _) => adaptive_surface(grid, cam),
        (None, 2) => extract_surface_2d(grid),
        (None, _) => extract_surface_3d(grid),
    }
}
