//! The hypertree grid data object: root layout, trees, mask, and cell fields.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::tree::{parse_bits, HyperTree};
use crate::{Error, Result};

/// Rectilinear root-cell layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub factor: usize,
    pub root_extent: Vec<usize>,
    pub axis_coordinates: Vec<Vec<f64>>,
}

impl GridSpec {
    /// Unit-spaced root cells starting at the origin.
    pub fn unit(dimension: usize, factor: usize, root_extent: &[usize]) -> Self {
        let axis_coordinates = root_extent.iter().map(|&n| (0..=n).map(|i| i as f64).collect()).collect();
        Self { dimension, factor, root_extent: root_extent.to_vec(), axis_coordinates }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dimension) {
            return Err(Error::BadDimension(self.dimension));
        }
        if !(2..=3).contains(&self.factor) {
            return Err(Error::BadFactor(self.factor));
        }
        if self.root_extent.len() != self.dimension {
            return Err(Error::BadAxisCoordinates {
                axis: self.root_extent.len().min(self.dimension),
                reason: format!("root_extent has {} entries", self.root_extent.len()),
            });
        }
        if self.axis_coordinates.len() != self.dimension {
            return Err(Error::BadAxisCoordinates {
                axis: self.axis_coordinates.len().min(self.dimension),
                reason: format!("{} coordinate lists for {} axes", self.axis_coordinates.len(), self.dimension),
            });
        }
        for (axis, (coords, &n)) in self.axis_coordinates.iter().zip(&self.root_extent).enumerate() {
            if n == 0 {
                return Err(Error::BadAxisCoordinates { axis, reason: "zero root cells".into() });
            }
            if coords.len() != n + 1 {
                return Err(Error::BadAxisCoordinates {
                    axis,
                    reason: format!("expected {} coordinates, got {}", n + 1, coords.len()),
                });
            }
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::BadAxisCoordinates { axis, reason: "non-finite coordinate".into() });
            }
            if coords.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::BadAxisCoordinates { axis, reason: "not strictly increasing".into() });
            }
        }
        Ok(())
    }

    pub fn root_count(&self) -> usize {
        self.root_extent.iter().product()
    }

    /// Children of a refined cell, `f^d`.
    pub fn children_per_cell(&self) -> usize {
        self.factor.pow(self.dimension as u32)
    }

    /// Row-major (x fastest) root coordinates of a tree.
    pub fn root_coords(&self, tree_index: usize) -> [usize; 3] {
        let mut c = [0; 3];
        let mut rest = tree_index;
        for (axis, &n) in self.root_extent.iter().enumerate() {
            c[axis] = rest % n;
            rest /= n;
        }
        c
    }

    pub fn root_index(&self, coords: [usize; 3]) -> usize {
        (0..self.dimension).rev().fold(0, |acc, axis| acc * self.root_extent[axis] + coords[axis])
    }

    /// Lower and upper corner of the whole grid. Unused axes are zero.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for (axis, coords) in self.axis_coordinates.iter().enumerate() {
            lo[axis] = coords[0];
            hi[axis] = *coords.last().unwrap();
        }
        (lo, hi)
    }

    /// Box of the cell at integer position `idx` (per axis, in units of
    /// `root_size / f^depth`) inside root `tree_index`.
    pub fn cell_box(&self, tree_index: usize, depth: usize, idx: [u64; 3]) -> ([f64; 3], [f64; 3]) {
        let root = self.root_coords(tree_index);
        let den = (self.factor as u64).pow(depth as u32);
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for axis in 0..self.dimension {
            let x0 = self.axis_coordinates[axis][root[axis]];
            let x1 = self.axis_coordinates[axis][root[axis] + 1];
            lo[axis] = axis_position(x0, x1, idx[axis], den);
            hi[axis] = axis_position(x0, x1, idx[axis] + 1, den);
        }
        (lo, hi)
    }
}

/// Position `num/den` of the way from `x0` to `x1`.
///
/// Equal fractions give bit-identical results at any depth, so cells of
/// different depths share their corner coordinates exactly.
#[inline]
pub fn axis_position(x0: f64, x1: f64, num: u64, den: u64) -> f64 {
    if num == 0 {
        x0
    } else if num == den {
        x1
    } else {
        x0 + (x1 - x0) * (num as f64 / den as f64)
    }
}

/// Deepest supported refinement, keeping `f^depth` exactly representable in an f64.
pub fn max_supported_depth(factor: usize) -> usize {
    if factor == 2 {
        48
    } else {
        30
    }
}

/// Global cell Id: tree offset plus breadth-first index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GlobalId(pub u64);

impl GlobalId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u64> for GlobalId {
    fn from(v: u64) -> Self {
        GlobalId(v)
    }
}

/// One bit per cell over global Ids; `true` means masked (hidden).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaterialMask {
    bits: Vec<bool>,
}

impl MaterialMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::new(parse_bits(s)?))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn is_masked(&self, id: usize) -> bool {
        self.bits[id]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_masked(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridStats {
    pub total_cells: usize,
    pub leaf_count: usize,
    /// Leaves hidden by their own mask bit or by a masked ancestor.
    pub masked_leaf_count: usize,
    /// Leaf count keyed by depth.
    pub depth_histogram: BTreeMap<usize, usize>,
}

/// Immutable hypertree grid. Attributes and mask bits exist for every cell,
/// coarse and leaf alike, indexed by [`GlobalId`].
#[derive(Clone, Debug)]
pub struct HyperTreeGrid {
    spec: GridSpec,
    trees: Vec<HyperTree>,
    /// `offsets[t]` = first global Id of tree `t`; last entry = total cells.
    offsets: Vec<usize>,
    mask: Option<MaterialMask>,
    fields: BTreeMap<String, Vec<f64>>,
    depth_limit: usize,
}

impl HyperTreeGrid {
    /// Validates and assembles a grid from descriptor strings.
    pub fn build<S: AsRef<str>>(
        spec: GridSpec,
        descriptors: &[S],
        mask: Option<&str>,
        fields: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self> {
        spec.validate()?;
        let children = spec.children_per_cell();
        let trees = descriptors
            .iter()
            .enumerate()
            .map(|(tree, d)| {
                let bits = parse_bits(d.as_ref())?;
                HyperTree::from_bits(&bits, children)
                    .map_err(|reason| Error::DescriptorLengthMismatch { tree, reason })
            })
            .collect::<Result<Vec<_>>>()?;
        let mask = mask.map(MaterialMask::parse).transpose()?;
        Self::from_trees(spec, trees, mask, fields)
    }

    pub fn from_trees(
        spec: GridSpec,
        trees: Vec<HyperTree>,
        mask: Option<MaterialMask>,
        fields: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self> {
        spec.validate()?;
        if trees.len() != spec.root_count() {
            return Err(Error::TreeCountMismatch { expected: spec.root_count(), found: trees.len() });
        }
        let children = spec.children_per_cell();
        let max_depth = max_supported_depth(spec.factor);
        let mut offsets = Vec::with_capacity(trees.len() + 1);
        let mut total = 0;
        let mut depth_limit = 0;
        for (i, t) in trees.iter().enumerate() {
            if t.children_per_cell() != children {
                return Err(Error::DescriptorLengthMismatch {
                    tree: i,
                    reason: format!("built for {} children per cell, grid needs {}", t.children_per_cell(), children),
                });
            }
            if t.depth() > max_depth {
                return Err(Error::DepthTooLarge { tree: i, depth: t.depth(), max: max_depth });
            }
            depth_limit = depth_limit.max(t.depth());
            offsets.push(total);
            total += t.cell_count();
        }
        offsets.push(total);
        if let Some(m) = &mask {
            if m.len() != total {
                return Err(Error::MaskLengthMismatch { expected: total, found: m.len() });
            }
        }
        for (name, values) in &fields {
            if values.len() != total {
                return Err(Error::FieldLengthMismatch { name: name.clone(), expected: total, found: values.len() });
            }
        }
        Ok(Self { spec, trees, offsets, mask, fields, depth_limit })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn factor(&self) -> usize {
        self.spec.factor
    }

    pub fn trees(&self) -> &[HyperTree] {
        &self.trees
    }

    pub fn tree(&self, tree_index: usize) -> &HyperTree {
        &self.trees[tree_index]
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn total_cells(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Deepest depth present in any tree.
    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn mask(&self) -> Option<&MaterialMask> {
        self.mask.as_ref()
    }

    pub fn fields(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.fields
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.get(name).map(Vec::as_slice)
    }

    #[inline]
    pub fn tree_offset(&self, tree_index: usize) -> usize {
        self.offsets[tree_index]
    }

    /// The cell's own mask bit (ancestors not consulted).
    #[inline]
    pub fn mask_bit(&self, id: usize) -> bool {
        self.mask.as_ref().is_some_and(|m| m.is_masked(id))
    }

    pub fn global_id(&self, tree_index: usize, bfs_index: usize) -> Result<GlobalId> {
        let tree = self
            .trees
            .get(tree_index)
            .ok_or_else(|| Error::IndexOutOfRange(format!("tree {tree_index} of {}", self.trees.len())))?;
        if bfs_index >= tree.cell_count() {
            return Err(Error::IndexOutOfRange(format!(
                "cell {bfs_index} of tree {tree_index} with {} cells",
                tree.cell_count()
            )));
        }
        Ok(GlobalId((self.offsets[tree_index] + bfs_index) as u64))
    }

    /// Inverse of [`global_id`](Self::global_id): `(tree_index, bfs_index)`.
    pub fn resolve_id(&self, id: GlobalId) -> Result<(usize, usize)> {
        let id = id.index();
        if id >= self.total_cells() {
            return Err(Error::IndexOutOfRange(format!("global id {id} of {}", self.total_cells())));
        }
        let tree = self.offsets.partition_point(|&o| o <= id) - 1;
        Ok((tree, id - self.offsets[tree]))
    }

    /// Per-cell effective mask of one tree: own bit OR any ancestor's bit.
    pub fn effective_mask(&self, tree_index: usize) -> Vec<bool> {
        let tree = &self.trees[tree_index];
        let offset = self.offsets[tree_index];
        let n = tree.cell_count();
        let Some(mask) = &self.mask else {
            return vec![false; n];
        };
        let children = tree.children_per_cell();
        let mut eff: Vec<bool> = (0..n).map(|i| mask.is_masked(offset + i)).collect();
        let mut next_child = 1;
        for i in 0..n {
            if tree.is_refined(i) {
                if eff[i] {
                    eff[next_child..next_child + children].iter_mut().for_each(|b| *b = true);
                }
                next_child += children;
            }
        }
        eff
    }

    pub fn stats(&self) -> GridStats {
        let mut depth_histogram = BTreeMap::new();
        let mut leaf_count = 0;
        let mut masked_leaf_count = 0;
        for (t, tree) in self.trees.iter().enumerate() {
            let eff = self.effective_mask(t);
            for (depth, pair) in tree.level_offsets().windows(2).enumerate() {
                for i in pair[0]..pair[1] {
                    if tree.is_leaf(i) {
                        leaf_count += 1;
                        *depth_histogram.entry(depth).or_insert(0) += 1;
                        masked_leaf_count += eff[i] as usize;
                    }
                }
            }
        }
        GridStats { total_cells: self.total_cells(), leaf_count, masked_leaf_count, depth_histogram }
    }
}
