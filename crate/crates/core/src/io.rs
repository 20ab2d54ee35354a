//! Text file formats.
//!
//! Grid files are JSON documents:
//!
//! ```json
//! {"version":1,"dimension":2,"factor":2,"root_extent":[1,1],
//!  "axis_coordinates":[[0,1],[0,1]],"trees":["1 0000"],
//!  "mask":"0 0010","fields":{"level":[0,1,1,1,1]}}
//! ```
//!
//! Descriptor and mask strings hold '0'/'1' characters; whitespace is
//! ignored. `mask` and `fields` are optional. Mesh files use the same
//! versioned envelope with a `kind` tag.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, HyperTreeGrid};
use crate::mesh::{PolyMesh, UnstructuredMesh};
use crate::tree::format_bits;
use crate::{Error, Result};

pub const GRID_FORMAT_VERSION: u32 = 1;
pub const MESH_FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct GridDocument {
    version: u32,
    dimension: usize,
    factor: usize,
    root_extent: Vec<usize>,
    axis_coordinates: Vec<Vec<f64>>,
    trees: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<String>,
    #[serde(default)]
    fields: BTreeMap<String, Vec<f64>>,
}

fn check_version(text: &str, supported: u32) -> Result<()> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.version != supported {
        return Err(Error::UnsupportedVersion(probe.version));
    }
    Ok(())
}

pub fn grid_to_string(grid: &HyperTreeGrid) -> String {
    let spec = grid.spec();
    let mask = grid.mask().map(|m| {
        (0..grid.tree_count())
            .map(|t| {
                let start = grid.tree_offset(t);
                format_bits(m.bits()[start..start + grid.tree(t).cell_count()].iter().copied())
            })
            .collect::<Vec<_>>()
            .join(" ")
    });
    let doc = GridDocument {
        version: GRID_FORMAT_VERSION,
        dimension: spec.dimension,
        factor: spec.factor,
        root_extent: spec.root_extent.clone(),
        axis_coordinates: spec.axis_coordinates.clone(),
        trees: grid.trees().iter().map(|t| t.descriptor_string()).collect(),
        mask,
        fields: grid.fields().clone(),
    };
    let mut s = serde_json::to_string(&doc).expect("grid document serializes");
    s.push('\n');
    s
}

pub fn parse_grid(text: &str) -> Result<HyperTreeGrid> {
    check_version(text, GRID_FORMAT_VERSION)?;
    let doc: GridDocument = serde_json::from_str(text)?;
    let spec = GridSpec {
        dimension: doc.dimension,
        factor: doc.factor,
        root_extent: doc.root_extent,
        axis_coordinates: doc.axis_coordinates,
    };
    HyperTreeGrid::build(spec, &doc.trees, doc.mask.as_deref(), doc.fields)
}

pub fn read_grid<R: Read>(mut r: R) -> Result<HyperTreeGrid> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    parse_grid(&text)
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<HyperTreeGrid> {
    parse_grid(&std::fs::read_to_string(path)?)
}

pub fn save_grid(grid: &HyperTreeGrid, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, grid_to_string(grid))?;
    Ok(())
}

/// Body of a native mesh file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshDocument {
    PolyMesh(PolyMesh),
    UnstructuredMesh(UnstructuredMesh),
    /// Preserve-topology selection: one bit per cell over global Ids.
    SelectionMask { bits: String },
}

impl MeshDocument {
    pub fn selection_mask(bits: &[bool]) -> Self {
        MeshDocument::SelectionMask { bits: format_bits(bits.iter().copied()) }
    }

    /// Number of output cells (quads, cells, or selected bits).
    pub fn cell_count(&self) -> usize {
        match self {
            MeshDocument::PolyMesh(m) => m.quad_count(),
            MeshDocument::UnstructuredMesh(m) => m.cell_count(),
            MeshDocument::SelectionMask { bits } => bits.chars().filter(|&c| c == '1').count(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MeshEnvelope {
    version: u32,
    #[serde(flatten)]
    body: MeshDocument,
}

pub fn write_mesh_native<W: Write>(doc: &MeshDocument, mut w: W) -> Result<()> {
    let env = MeshEnvelope { version: MESH_FORMAT_VERSION, body: doc.clone() };
    serde_json::to_writer(&mut w, &env)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn parse_mesh_native(text: &str) -> Result<MeshDocument> {
    check_version(text, MESH_FORMAT_VERSION)?;
    let env: MeshEnvelope = serde_json::from_str(text)?;
    Ok(env.body)
}

/// Counts `f` records in an OBJ document.
pub fn obj_face_count(text: &str) -> usize {
    text.lines().filter(|l| l.starts_with("f ")).count()
}
