//! Output geometry: polygonal surfaces and unstructured cell meshes.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::grid::HyperTreeGrid;

/// Per-cell attributes carried by output meshes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellAttributes {
    pub global_id: Vec<u64>,
    pub depth: Vec<u32>,
    /// Copies of the grid's named cell fields.
    pub fields: BTreeMap<String, Vec<f64>>,
}

impl CellAttributes {
    fn for_grid(grid: &HyperTreeGrid) -> Self {
        Self {
            global_id: Vec::new(),
            depth: Vec::new(),
            fields: grid.fields().keys().map(|k| (k.clone(), Vec::new())).collect(),
        }
    }

    fn push(&mut self, grid: &HyperTreeGrid, global_id: usize, depth: usize) {
        self.global_id.push(global_id as u64);
        self.depth.push(depth as u32);
        for (name, values) in self.fields.iter_mut() {
            values.push(grid.fields()[name][global_id]);
        }
    }

    pub fn len(&self) -> usize {
        self.global_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global_id.is_empty()
    }

    /// Scalar view of an attribute by name; `depth` and `global_id` are built in.
    pub fn scalar(&self, name: &str) -> Option<Vec<f64>> {
        match name {
            "depth" => Some(self.depth.iter().map(|&d| d as f64).collect()),
            "global_id" => Some(self.global_id.iter().map(|&g| g as f64).collect()),
            other => self.fields.get(other).cloned(),
        }
    }
}

/// Deduplicates points by exact coordinate match.
#[derive(Default)]
pub(crate) struct PointPool {
    points: Vec<[f64; 3]>,
    lookup: HashMap<[u64; 3], u32>,
}

impl PointPool {
    pub(crate) fn insert(&mut self, p: [f64; 3]) -> u32 {
        // +0.0 folds -0.0 into the same key.
        let key = [(p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits(), (p[2] + 0.0).to_bits()];
        let points = &mut self.points;
        *self.lookup.entry(key).or_insert_with(|| {
            points.push(p);
            (points.len() - 1) as u32
        })
    }

    pub(crate) fn into_points(self) -> Vec<[f64; 3]> {
        self.points
    }
}

/// Quad surface mesh. Quads are axis-aligned rectangles wound
/// counter-clockwise around their outward normal (+z for 2D grids).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PolyMesh {
    pub points: Vec<[f64; 3]>,
    pub quads: Vec<[u32; 4]>,
    pub cell_attributes: CellAttributes,
}

impl PolyMesh {
    pub fn quad_count(&self) -> usize {
        self.quads.len()
    }

    /// Componentwise min/max corner of quad `i`.
    pub fn quad_bounds(&self, i: usize) -> ([f64; 3], [f64; 3]) {
        bounds_of(&self.points, &self.quads[i])
    }

    pub fn quad_area(&self, i: usize) -> f64 {
        let q = self.quads[i].map(|k| self.points[k as usize]);
        let e1 = sub(q[1], q[0]);
        let e2 = sub(q[3], q[0]);
        norm(cross(e1, e2))
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_obj_points(&mut w, &self.points)?;
        for q in &self.quads {
            writeln!(w, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1)?;
        }
        Ok(())
    }
}

pub(crate) struct PolyMeshBuilder<'g> {
    grid: &'g HyperTreeGrid,
    pool: PointPool,
    quads: Vec<[u32; 4]>,
    attributes: CellAttributes,
}

impl<'g> PolyMeshBuilder<'g> {
    pub(crate) fn new(grid: &'g HyperTreeGrid) -> Self {
        Self { grid, pool: PointPool::default(), quads: Vec::new(), attributes: CellAttributes::for_grid(grid) }
    }

    pub(crate) fn push_quad(&mut self, corners: [[f64; 3]; 4], global_id: usize, depth: usize) {
        let q = corners.map(|p| self.pool.insert(p));
        self.quads.push(q);
        self.attributes.push(self.grid, global_id, depth);
    }

    pub(crate) fn finish(self) -> PolyMesh {
        PolyMesh { points: self.pool.into_points(), quads: self.quads, cell_attributes: self.attributes }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellType {
    Quad,
    Hexahedron,
}

impl CellType {
    pub fn point_count(self) -> usize {
        match self {
            CellType::Quad => 4,
            CellType::Hexahedron => 8,
        }
    }
}

/// Hexahedron faces as local point indices, outward counter-clockwise.
const HEX_FACES: [[usize; 4]; 6] =
    [[0, 4, 7, 3], [1, 2, 6, 5], [0, 1, 5, 4], [3, 7, 6, 2], [0, 3, 2, 1], [4, 5, 6, 7]];

/// Explicit cells: quads for 2D grids, hexahedra for 3D grids.
///
/// Hexahedron point order is the bottom face counter-clockwise seen from +z,
/// then the top face in the same order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnstructuredMesh {
    pub points: Vec<[f64; 3]>,
    pub cell_types: Vec<CellType>,
    pub connectivity: Vec<u32>,
    pub cell_attributes: CellAttributes,
}

impl UnstructuredMesh {
    pub fn cell_count(&self) -> usize {
        self.cell_types.len()
    }

    /// Iterates `(type, point indices)` in cell order.
    pub fn cells(&self) -> impl Iterator<Item = (CellType, &[u32])> + '_ {
        let mut at = 0;
        self.cell_types.iter().map(move |&t| {
            let n = t.point_count();
            let c = &self.connectivity[at..at + n];
            at += n;
            (t, c)
        })
    }

    pub fn cell_bounds(&self) -> Vec<([f64; 3], [f64; 3])> {
        self.cells().map(|(_, c)| bounds_of(&self.points, c)).collect()
    }

    /// Quads as-is; hexahedra as their six faces.
    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_obj_points(&mut w, &self.points)?;
        for (t, c) in self.cells() {
            match t {
                CellType::Quad => writeln!(w, "f {} {} {} {}", c[0] + 1, c[1] + 1, c[2] + 1, c[3] + 1)?,
                CellType::Hexahedron => {
                    for f in HEX_FACES {
                        writeln!(w, "f {} {} {} {}", c[f[0]] + 1, c[f[1]] + 1, c[f[2]] + 1, c[f[3]] + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) struct UnstructuredBuilder<'g> {
    grid: &'g HyperTreeGrid,
    pool: PointPool,
    mesh: UnstructuredMesh,
}

impl<'g> UnstructuredBuilder<'g> {
    pub(crate) fn new(grid: &'g HyperTreeGrid) -> Self {
        let mesh = UnstructuredMesh { cell_attributes: CellAttributes::for_grid(grid), ..Default::default() };
        Self { grid, pool: PointPool::default(), mesh }
    }

    /// Appends the box `[lo, hi]` as a quad (2D) or hexahedron (3D).
    pub(crate) fn push_box(&mut self, lo: [f64; 3], hi: [f64; 3], global_id: usize, depth: usize) {
        let corners2 = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
        if self.grid.dimension() == 2 {
            for c in corners2 {
                let i = self.pool.insert([c[0], c[1], 0.0]);
                self.mesh.connectivity.push(i);
            }
            self.mesh.cell_types.push(CellType::Quad);
        } else {
            for z in [lo[2], hi[2]] {
                for c in corners2 {
                    let i = self.pool.insert([c[0], c[1], z]);
                    self.mesh.connectivity.push(i);
                }
            }
            self.mesh.cell_types.push(CellType::Hexahedron);
        }
        self.mesh.cell_attributes.push(self.grid, global_id, depth);
    }

    pub(crate) fn finish(mut self) -> UnstructuredMesh {
        self.mesh.points = self.pool.into_points();
        self.mesh
    }
}

fn write_obj_points<W: Write>(w: &mut W, points: &[[f64; 3]]) -> io::Result<()> {
    for p in points {
        writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
    }
    Ok(())
}

fn bounds_of(points: &[[f64; 3]], idx: &[u32]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &k in idx {
        let p = points[k as usize];
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}
