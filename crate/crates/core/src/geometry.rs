//! Non-adaptive surface extraction.

use crate::cursor::{GeometricCursor, Neighbor, NeighborCell, VonNeumannSupercursor};
use crate::grid::HyperTreeGrid;
use crate::mesh::{PolyMesh, PolyMeshBuilder};
use crate::{Error, Result};

pub(crate) fn require_dimension(grid: &HyperTreeGrid, expected: usize) -> Result<()> {
    if grid.dimension() != expected {
        return Err(Error::WrongDimension { expected, found: grid.dimension() });
    }
    Ok(())
}

/// Rectangle corners counter-clockwise seen from +z, lifted to height `z`.
#[inline]
pub(crate) fn rect_corners(lo: [f64; 3], hi: [f64; 3], z: f64) -> [[f64; 3]; 4] {
    [[lo[0], lo[1], z], [hi[0], lo[1], z], [hi[0], hi[1], z], [lo[0], hi[1], z]]
}

/// One quad per unmasked leaf, in tree order then depth-first child order.
pub fn extract_surface_2d(grid: &HyperTreeGrid) -> Result<PolyMesh> {
    require_dimension(grid, 2)?;
    Ok(leaf_quads(grid, |_| 0.0))
}

/// The 2D surface with each quad raised to `depth × height_scale`.
pub fn elevate_by_depth(grid: &HyperTreeGrid, height_scale: f64) -> Result<PolyMesh> {
    require_dimension(grid, 2)?;
    Ok(leaf_quads(grid, |depth| depth as f64 * height_scale))
}

fn leaf_quads(grid: &HyperTreeGrid, height: impl Fn(usize) -> f64) -> PolyMesh {
    fn visit(c: &GeometricCursor, out: &mut PolyMeshBuilder, height: &dyn Fn(usize) -> f64) {
        if c.is_masked() {
            return;
        }
        if c.is_leaf() {
            out.push_quad(rect_corners(c.origin(), c.upper(), height(c.depth())), c.global_id(), c.depth());
        } else {
            for child in c.children() {
                visit(&child, out, height);
            }
        }
    }
    let mut out = PolyMeshBuilder::new(grid);
    for t in 0..grid.tree_count() {
        let root = GeometricCursor::root(grid, t).expect("tree index in range");
        visit(&root, &mut out, &height);
    }
    out.finish()
}

/// Outer surface of a 3D grid.
///
/// Every face of an unmasked leaf is emitted when the region across it holds
/// no unmasked material: no neighbor, a masked neighbor, or a refined
/// same-depth neighbor whose leaves touching the face are all masked.
pub fn extract_surface_3d(grid: &HyperTreeGrid) -> Result<PolyMesh> {
    require_dimension(grid, 3)?;
    let mut out = PolyMeshBuilder::new(grid);
    for t in 0..grid.tree_count() {
        let sc = VonNeumannSupercursor::root(grid, t).expect("tree index in range");
        visit_3d(grid, &sc, &mut out);
    }
    Ok(out.finish())
}

fn visit_3d(grid: &HyperTreeGrid, sc: &VonNeumannSupercursor, out: &mut PolyMeshBuilder) {
    let c = sc.center();
    if c.is_masked() {
        return;
    }
    if !c.is_leaf() {
        for child in 0..grid.spec().children_per_cell() {
            visit_3d(grid, &sc.child_unchecked(child), out);
        }
        return;
    }
    let (lo, hi) = (c.origin(), c.upper());
    for axis in 0..3 {
        for positive in [false, true] {
            if face_exposed(grid, sc.neighbor(axis, positive), axis, positive) {
                out.push_quad(face_corners(lo, hi, axis, positive), c.global_id(), c.depth());
            }
        }
    }
}

fn face_exposed(grid: &HyperTreeGrid, neighbor: &Neighbor, axis: usize, positive: bool) -> bool {
    match neighbor {
        Neighbor::Absent => true,
        Neighbor::Cell(n) => face_leaves_masked(grid, n, axis, positive),
    }
}

/// True when every leaf of `n` touching the shared face is masked. The shared
/// face is `n`'s lower side on `axis` when `n` lies on the positive side.
fn face_leaves_masked(grid: &HyperTreeGrid, n: &NeighborCell, axis: usize, positive: bool) -> bool {
    if n.masked {
        return true;
    }
    if n.is_leaf {
        return false;
    }
    let f = grid.factor();
    let digit = if positive { 0 } else { f - 1 };
    let stride = f.pow(axis as u32);
    (0..grid.spec().children_per_cell())
        .filter(|c| (c / stride) % f == digit)
        .all(|c| face_leaves_masked(grid, &n.descend(grid, c), axis, positive))
}

/// Face of box `[lo, hi]` normal to `axis`, wound counter-clockwise around
/// the outward normal.
fn face_corners(lo: [f64; 3], hi: [f64; 3], axis: usize, positive: bool) -> [[f64; 3]; 4] {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    let w = if positive { hi[axis] } else { lo[axis] };
    let at = |a: f64, b: f64| {
        let mut p = [0.0; 3];
        p[axis] = w;
        p[u] = a;
        p[v] = b;
        p
    };
    if positive {
        [at(lo[u], lo[v]), at(hi[u], lo[v]), at(hi[u], hi[v]), at(lo[u], hi[v])]
    } else {
        [at(lo[u], lo[v]), at(lo[u], hi[v]), at(hi[u], hi[v]), at(hi[u], lo[v])]
    }
}
