//! Brute-force reference answers for the filters.
//!
//! Cells are decoded straight from the descriptor bits with a FIFO queue,
//! independent of the rank-based child lookup and the cursors. Every check
//! below is a flat scan over the decoded cells.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use htg_core::{HyperTreeGrid, PolyMesh};

#[derive(Clone, Debug)]
pub struct OracleCell {
    pub gid: u64,
    pub tree: usize,
    pub depth: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub leaf: bool,
    /// Own mask bit or any ancestor's.
    pub masked: bool,
    pub parent: Option<usize>,
}

fn position(x0: f64, x1: f64, num: u64, den: u64) -> f64 {
    if num == 0 {
        x0
    } else if num == den {
        x1
    } else {
        x0 + (x1 - x0) * (num as f64 / den as f64)
    }
}

pub fn decode(grid: &HyperTreeGrid) -> Vec<OracleCell> {
    let spec = grid.spec();
    let d = spec.dimension;
    let f = spec.factor as u64;
    let children = spec.children_per_cell();
    let mask_bits = grid.mask().map(|m| m.bits().to_vec());
    let mut cells = Vec::new();
    let mut gid = 0u64;
    for t in 0..grid.tree_count() {
        let mut root = [0usize; 3];
        let mut rest = t;
        for a in 0..d {
            root[a] = rest % spec.root_extent[a];
            rest /= spec.root_extent[a];
        }
        let bits: Vec<bool> = grid.tree(t).bits().collect();
        let mut queue: VecDeque<([u64; 3], usize, Option<usize>, bool)> = VecDeque::new();
        queue.push_back(([0; 3], 0, None, false));
        let mut next = 0;
        while let Some((pos, depth, parent, inherited)) = queue.pop_front() {
            let refined = bits[next];
            next += 1;
            let own = mask_bits.as_ref().is_some_and(|m| m[gid as usize]);
            let masked = inherited || own;
            let den = f.pow(depth as u32);
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for a in 0..d {
                let x0 = spec.axis_coordinates[a][root[a]];
                let x1 = spec.axis_coordinates[a][root[a] + 1];
                lo[a] = position(x0, x1, pos[a], den);
                hi[a] = position(x0, x1, pos[a] + 1, den);
            }
            let me = cells.len();
            cells.push(OracleCell { gid, tree: t, depth, lo, hi, leaf: !refined, masked, parent });
            gid += 1;
            if refined {
                for c in 0..children as u64 {
                    let mut cp = [0u64; 3];
                    let mut r = c;
                    for a in 0..d {
                        cp[a] = pos[a] * f + r % f;
                        r /= f;
                    }
                    queue.push_back((cp, depth + 1, Some(me), masked));
                }
            }
        }
        assert_eq!(next, bits.len(), "descriptor fully consumed");
    }
    cells
}

pub type RectKey = ([u64; 3], [u64; 3], u64);

fn key(lo: [f64; 3], hi: [f64; 3], gid: u64) -> RectKey {
    (lo.map(|v| (v + 0.0).to_bits()), hi.map(|v| (v + 0.0).to_bits()), gid)
}

/// Sorted multiset of (box, global id) over a mesh's quads.
pub fn mesh_keys(mesh: &PolyMesh) -> Vec<RectKey> {
    let mut v: Vec<RectKey> = (0..mesh.quad_count())
        .map(|i| {
            let (lo, hi) = mesh.quad_bounds(i);
            key(lo, hi, mesh.cell_attributes.global_id[i])
        })
        .collect();
    v.sort_unstable();
    v
}

/// All unmasked leaves.
pub fn surface_2d(cells: &[OracleCell]) -> Vec<RectKey> {
    let mut v: Vec<RectKey> = cells.iter().filter(|c| c.leaf && !c.masked).map(|c| key(c.lo, c.hi, c.gid)).collect();
    v.sort_unstable();
    v
}

pub fn rect_intersects(c: &OracleCell, min: [f64; 2], max: [f64; 2]) -> bool {
    c.lo[0] <= max[0] && c.hi[0] >= min[0] && c.lo[1] <= max[1] && c.hi[1] >= min[1]
}

/// Unmasked cells that are leaves at depth ≤ cap or non-leaves at exactly
/// cap, intersecting the closed view rectangle.
pub fn adaptive(cells: &[OracleCell], cap: usize, min: [f64; 2], max: [f64; 2]) -> Vec<RectKey> {
    let mut v: Vec<RectKey> = cells
        .iter()
        .filter(|c| !c.masked && ((c.leaf && c.depth <= cap) || c.depth == cap) && rect_intersects(c, min, max))
        .map(|c| key(c.lo, c.hi, c.gid))
        .collect();
    v.sort_unstable();
    v
}

/// Outer faces of a 3D grid: a face of an unmasked leaf is emitted when
/// every leaf on the other side sharing positive area with it is masked.
pub fn surface_3d(cells: &[OracleCell]) -> Vec<RectKey> {
    let leaves: Vec<&OracleCell> = cells.iter().filter(|c| c.leaf).collect();
    // Leaves indexed by (axis, plane coordinate of their lower / upper face).
    let mut by_lo: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut by_hi: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    for (i, c) in leaves.iter().enumerate() {
        for a in 0..3 {
            by_lo.entry((a, c.lo[a].to_bits())).or_default().push(i);
            by_hi.entry((a, c.hi[a].to_bits())).or_default().push(i);
        }
    }
    let empty = Vec::new();
    let mut out = Vec::new();
    for c in leaves.iter().filter(|c| !c.masked) {
        for a in 0..3 {
            let (u, v) = ((a + 1) % 3, (a + 2) % 3);
            for positive in [false, true] {
                let plane = if positive { c.hi[a] } else { c.lo[a] };
                let across = if positive { by_lo.get(&(a, plane.to_bits())) } else { by_hi.get(&(a, plane.to_bits())) };
                let exposed = across
                    .unwrap_or(&empty)
                    .iter()
                    .map(|&j| leaves[j])
                    .filter(|m| {
                        m.hi[u].min(c.hi[u]) - m.lo[u].max(c.lo[u]) > 0.0
                            && m.hi[v].min(c.hi[v]) - m.lo[v].max(c.lo[v]) > 0.0
                    })
                    .all(|m| m.masked);
                if exposed {
                    let mut lo = c.lo;
                    let mut hi = c.hi;
                    lo[a] = plane;
                    hi[a] = plane;
                    out.push(key(lo, hi, c.gid));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Deepest cell with depth ≤ `max_depth` containing `p`.
pub fn deepest_containing(cells: &[OracleCell], p: [f64; 3], dim: usize, max_depth: usize) -> Option<&OracleCell> {
    cells
        .iter()
        .filter(|c| c.depth <= max_depth && (0..dim).all(|a| c.lo[a] <= p[a] && p[a] <= c.hi[a]))
        .max_by_key(|c| c.depth)
}

/// Leaves hit by at least one point under the half-open rule (upper grid faces closed).
pub fn locations(cells: &[OracleCell], points: &[Vec<f64>], grid_hi: [f64; 3], include_masked: bool) -> Vec<u64> {
    let dim = points.first().map_or(0, Vec::len);
    let mut v: Vec<u64> = cells
        .iter()
        .filter(|c| c.leaf && (include_masked || !c.masked))
        .filter(|c| {
            points.iter().any(|p| {
                (0..dim).all(|a| c.lo[a] <= p[a] && (p[a] < c.hi[a] || (p[a] == c.hi[a] && c.hi[a] == grid_hi[a])))
            })
        })
        .map(|c| c.gid)
        .collect();
    v.sort_unstable();
    v
}

/// Cells whose Id is listed, that are eligible, and with no listed ancestor.
pub fn ids(cells: &[OracleCell], wanted: &[u64], include_masked: bool) -> Vec<u64> {
    let set: HashSet<u64> = wanted.iter().copied().collect();
    let mut v: Vec<u64> = cells
        .iter()
        .filter(|c| (include_masked || !c.masked) && set.contains(&c.gid))
        .filter(|c| {
            let mut p = c.parent;
            while let Some(i) = p {
                if set.contains(&cells[i].gid) {
                    return false;
                }
                p = cells[i].parent;
            }
            true
        })
        .map(|c| c.gid)
        .collect();
    v.sort_unstable();
    v
}
