//! Selection extraction by world-space location or by global Id.
//!
//! Location mode selects leaves whose half-open box `[origin, origin + size)`
//! contains a query point; a box face on the grid's upper boundary is closed.
//! Id mode compares each visited cell's global Id before descending, so a
//! matching coarse cell is selected whole and its subtree is not searched.
//!
//! Masked cells (own bit or ancestor's) are skipped unless `include_masked`.

use serde::{Deserialize, Serialize};

use crate::cursor::GeometricCursor;
use crate::grid::HyperTreeGrid;
use crate::mesh::{UnstructuredBuilder, UnstructuredMesh};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SelectionKind {
    Locations { points: Vec<Vec<f64>> },
    Ids { ids: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRequest {
    #[serde(flatten)]
    pub kind: SelectionKind,
    #[serde(default)]
    pub preserve_topology: bool,
    #[serde(default)]
    pub include_masked: bool,
}

impl SelectionRequest {
    pub fn locations(points: Vec<Vec<f64>>) -> Self {
        Self { kind: SelectionKind::Locations { points }, preserve_topology: false, include_masked: false }
    }

    pub fn ids(ids: Vec<u64>) -> Self {
        Self { kind: SelectionKind::Ids { ids }, preserve_topology: false, include_masked: false }
    }

    pub fn preserve_topology(mut self, yes: bool) -> Self {
        self.preserve_topology = yes;
        self
    }

    pub fn include_masked(mut self, yes: bool) -> Self {
        self.include_masked = yes;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SelectionOutput {
    /// One entry per cell over global Ids; `true` = selected.
    Mask(Vec<bool>),
    Mesh(UnstructuredMesh),
}

impl SelectionOutput {
    /// Selected global Ids in ascending order.
    pub fn selected_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = match self {
            SelectionOutput::Mask(bits) => {
                bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
            }
            SelectionOutput::Mesh(m) => m.cell_attributes.global_id.clone(),
        };
        ids.sort_unstable();
        ids
    }

    pub fn selected_count(&self) -> usize {
        match self {
            SelectionOutput::Mask(bits) => bits.iter().filter(|&&b| b).count(),
            SelectionOutput::Mesh(m) => m.cell_count(),
        }
    }
}

/// Dispatches on the request kind.
pub fn extract_selection(grid: &HyperTreeGrid, request: &SelectionRequest) -> Result<SelectionOutput> {
    match &request.kind {
        SelectionKind::Locations { .. } => extract_selected_locations(grid, request),
        SelectionKind::Ids { .. } => extract_selected_ids(grid, request),
    }
}

pub fn extract_selected_locations(grid: &HyperTreeGrid, request: &SelectionRequest) -> Result<SelectionOutput> {
    let SelectionKind::Locations { points } = &request.kind else {
        return Err(Error::Parse("expected a location selection".into()));
    };
    let dim = grid.dimension();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    let (_, grid_hi) = grid.spec().bounds();
    let contains = |c: &GeometricCursor, p: &[f64]| {
        let (lo, hi) = (c.origin(), c.upper());
        (0..dim).all(|a| lo[a] <= p[a] && (p[a] < hi[a] || (p[a] == hi[a] && hi[a] == grid_hi[a])))
    };

    let mut selected = Vec::new();
    let all: Vec<usize> = (0..points.len()).collect();
    for t in 0..grid.tree_count() {
        let root = GeometricCursor::root(grid, t)?;
        visit_locations(&root, points, &all, request.include_masked, &contains, &mut selected);
    }
    Ok(finish(grid, request, selected))
}

fn visit_locations<'a>(
    c: &GeometricCursor<'a>,
    points: &[Vec<f64>],
    candidates: &[usize],
    include_masked: bool,
    contains: &dyn Fn(&GeometricCursor, &[f64]) -> bool,
    out: &mut Vec<GeometricCursor<'a>>,
) {
    if c.is_masked() && !include_masked {
        return;
    }
    let inside: Vec<usize> = candidates.iter().copied().filter(|&i| contains(c, &points[i])).collect();
    if inside.is_empty() {
        return;
    }
    if c.is_leaf() {
        out.push(*c);
        return;
    }
    for child in c.children() {
        visit_locations(&child, points, &inside, include_masked, contains, out);
    }
}

pub fn extract_selected_ids(grid: &HyperTreeGrid, request: &SelectionRequest) -> Result<SelectionOutput> {
    let SelectionKind::Ids { ids } = &request.kind else {
        return Err(Error::Parse("expected an id selection".into()));
    };
    let mut wanted = ids.clone();
    wanted.sort_unstable();
    wanted.dedup();

    let mut selected = Vec::new();
    for t in 0..grid.tree_count() {
        let start = grid.tree_offset(t) as u64;
        let end = start + grid.tree(t).cell_count() as u64;
        let first = wanted.partition_point(|&i| i < start);
        if first == wanted.len() || wanted[first] >= end {
            continue;
        }
        let root = GeometricCursor::root(grid, t)?;
        visit_ids(&root, &wanted, request.include_masked, &mut selected);
    }
    Ok(finish(grid, request, selected))
}

fn visit_ids<'a>(c: &GeometricCursor<'a>, wanted: &[u64], include_masked: bool, out: &mut Vec<GeometricCursor<'a>>) {
    if c.is_masked() && !include_masked {
        return;
    }
    if wanted.binary_search(&(c.global_id() as u64)).is_ok() {
        out.push(*c);
        return;
    }
    for child in c.children() {
        visit_ids(&child, wanted, include_masked, out);
    }
}

fn finish(grid: &HyperTreeGrid, request: &SelectionRequest, selected: Vec<GeometricCursor>) -> SelectionOutput {
    if request.preserve_topology {
        let mut bits = vec![false; grid.total_cells()];
        for c in &selected {
            bits[c.global_id()] = true;
        }
        SelectionOutput::Mask(bits)
    } else {
        let mut b = UnstructuredBuilder::new(grid);
        for c in &selected {
            b.push_box(c.origin(), c.upper(), c.global_id(), c.depth());
        }
        SelectionOutput::Mesh(b.finish())
    }
}
