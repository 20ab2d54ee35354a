//! Tree-based AMR ("hypertree grid") kernel.
//!
//! A [`HyperTreeGrid`] is a rectilinear layout of root cells, each owning a
//! refinement tree stored as a breadth-first bitstream. On top of the grid
//! sit the traversal handles ([`GeometricCursor`], [`VonNeumannSupercursor`])
//! and the filters built from them:
//!
//! * [`geometry`]: full surface extraction (all leaves in 2D, outer faces in 3D)
//!   and the exploded-depth elevation view.
//! * [`adaptive`]: camera-dependent 2D surface extraction with frustum and
//!   sub-pixel culling.
//! * [`selection`]: extraction by world-space location or by global cell Id.

pub mod adaptive;
pub mod cursor;
pub mod error;
pub mod generate;

pub mod geometry;
pub mod grid;
pub mod io;

pub mod mesh;
pub mod selection;

pub mod tree;


pub use cursor::{GeometricCursor, Neighbor, NeighborCell, VonNeumannSupercursor};
pub use error::{Error, Result};
pub use adaptive::{adaptive_surface, max_depth, surface_for_camera_or_full, view_rect, Camera2D, ViewRect};
pub use geometry::{elevate_by_depth, extract_surface_2d, extract_surface_3d};
pub use grid::{GlobalId, GridSpec, GridStats, HyperTreeGrid, MaterialMask};
pub use mesh::{CellAttributes, CellType, PolyMesh, UnstructuredMesh};
pub use tree::HyperTree;
pub use selection::{
    extract_selected_ids, extract_selected_locations, extract_selection, SelectionKind, SelectionOutput,
    SelectionRequest,
};
