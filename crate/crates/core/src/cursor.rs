//! Traversal handles over a hypertree grid.
//!
//! A [`GeometricCursor`] tracks a cell's integer position inside its root
//! cell; world-space origin and size are derived from that position, so a
//! cursor reached through any path yields exactly the same box.
//!
//! A [`VonNeumannSupercursor`] adds the `2d` face neighbors. A neighbor is the
//! deepest cell covering the face-adjacent region whose depth does not exceed
//! the center's; it may sit in another tree.

use crate::grid::HyperTreeGrid;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct GeometricCursor<'a> {
    grid: &'a HyperTreeGrid,
    tree_index: usize,
    bfs_index: usize,
    depth: usize,
    position: [u64; 3],
    origin: [f64; 3],
    upper: [f64; 3],
    masked: bool,
}

impl<'a> GeometricCursor<'a> {
    pub fn root(grid: &'a HyperTreeGrid, tree_index: usize) -> Result<Self> {
        if tree_index >= grid.tree_count() {
            return Err(Error::IndexOutOfRange(format!("tree {tree_index} of {}", grid.tree_count())));
        }
        Ok(Self::at(grid, tree_index, 0, 0, [0; 3], grid.mask_bit(grid.tree_offset(tree_index))))
    }

    fn at(grid: &'a HyperTreeGrid, tree_index: usize, bfs_index: usize, depth: usize, position: [u64; 3], masked: bool) -> Self {
        let (origin, upper) = grid.spec().cell_box(tree_index, depth, position);
        Self { grid, tree_index, bfs_index, depth, position, origin, upper, masked }
    }

    pub fn to_child(&self, child: usize) -> Result<Self> {
        let tree = self.grid.tree(self.tree_index);
        if !tree.is_refined(self.bfs_index) {
            return Err(Error::NotRefined);
        }
        if child >= tree.children_per_cell() {
            return Err(Error::IndexOutOfRange(format!("child {child} of {}", tree.children_per_cell())));
        }
        Ok(self.child_unchecked(child))
    }

    #[inline]
    pub(crate) fn child_unchecked(&self, child: usize) -> Self {
        let tree = self.grid.tree(self.tree_index);
        let bfs_index = tree.first_child(self.bfs_index) + child;
        let position = child_position(self.position, child, self.grid.factor(), self.grid.dimension());
        let masked = self.masked || self.grid.mask_bit(self.grid.tree_offset(self.tree_index) + bfs_index);
        Self::at(self.grid, self.tree_index, bfs_index, self.depth + 1, position, masked)
    }

    /// All children in row-major order; empty for a leaf.
    pub fn children(&self) -> impl Iterator<Item = GeometricCursor<'a>> + '_ {
        let n = if self.is_leaf() { 0 } else { self.grid.spec().children_per_cell() };
        (0..n).map(move |c| self.child_unchecked(c))
    }

    pub fn grid(&self) -> &'a HyperTreeGrid {
        self.grid
    }

    pub fn tree_index(&self) -> usize {
        self.tree_index
    }

    pub fn bfs_index(&self) -> usize {
        self.bfs_index
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub fn global_id(&self) -> usize {
        self.grid.tree_offset(self.tree_index) + self.bfs_index
    }

    /// Integer position per axis in units of `root_size / f^depth`.
    pub fn position(&self) -> [u64; 3] {
        self.position
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    /// Upper corner (`origin + size`).
    pub fn upper(&self) -> [f64; 3] {
        self.upper
    }

    pub fn size(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for axis in 0..self.grid.dimension() {
            s[axis] = self.upper[axis] - self.origin[axis];
        }
        s
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.grid.tree(self.tree_index).is_leaf(self.bfs_index)
    }

    /// Masked by its own bit or by any ancestor's.
    #[inline]
    pub fn is_masked(&self) -> bool {
        self.masked
    }

    /// Child indices from the root down to this cell.
    pub fn path(&self) -> Vec<usize> {
        let f = self.grid.factor() as u64;
        let d = self.grid.dimension();
        let mut path = vec![0; self.depth];
        let mut pos = self.position;
        for slot in path.iter_mut().rev() {
            let mut c = 0;
            for axis in (0..d).rev() {
                c = c * f + pos[axis] % f;
                pos[axis] /= f;
            }
            *slot = c as usize;
        }
        path
    }
}

#[inline]
fn child_position(parent: [u64; 3], child: usize, factor: usize, dimension: usize) -> [u64; 3] {
    let f = factor as u64;
    let mut c = child as u64;
    let mut p = [0; 3];
    for axis in 0..dimension {
        p[axis] = parent[axis] * f + c % f;
        c /= f;
    }
    p
}

/// A face neighbor resolved by the supercursor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborCell {
    pub tree_index: usize,
    pub bfs_index: usize,
    pub depth: usize,
    pub position: [u64; 3],
    /// Effective mask: own bit or any ancestor's.
    pub masked: bool,
    pub is_leaf: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    /// Outside the grid.
    Absent,
    Cell(NeighborCell),
}

impl Neighbor {
    pub fn cell(&self) -> Option<&NeighborCell> {
        match self {
            Neighbor::Absent => None,
            Neighbor::Cell(c) => Some(c),
        }
    }
}

impl NeighborCell {
    fn new(grid: &HyperTreeGrid, tree_index: usize, bfs_index: usize, depth: usize, position: [u64; 3], inherited_mask: bool) -> Self {
        let masked = inherited_mask || grid.mask_bit(grid.tree_offset(tree_index) + bfs_index);
        let is_leaf = grid.tree(tree_index).is_leaf(bfs_index);
        Self { tree_index, bfs_index, depth, position, masked, is_leaf }
    }

    /// Child `child` of this (refined) neighbor.
    pub fn descend(&self, grid: &HyperTreeGrid, child: usize) -> Self {
        let tree = grid.tree(self.tree_index);
        let bfs = tree.first_child(self.bfs_index) + child;
        let pos = child_position(self.position, child, grid.factor(), grid.dimension());
        Self::new(grid, self.tree_index, bfs, self.depth + 1, pos, self.masked)
    }

    pub fn global_id(&self, grid: &HyperTreeGrid) -> usize {
        grid.tree_offset(self.tree_index) + self.bfs_index
    }
}

/// Slot of the neighbor across the face on `axis`, `positive` side.
#[inline]
pub fn face_slot(axis: usize, positive: bool) -> usize {
    2 * axis + positive as usize
}

#[derive(Clone, Copy, Debug)]
pub struct VonNeumannSupercursor<'a> {
    center: GeometricCursor<'a>,
    neighbors: [Neighbor; 6],
}

impl<'a> VonNeumannSupercursor<'a> {
    pub fn root(grid: &'a HyperTreeGrid, tree_index: usize) -> Result<Self> {
        let center = GeometricCursor::root(grid, tree_index)?;
        let spec = grid.spec();
        let coords = spec.root_coords(tree_index);
        let mut neighbors = [Neighbor::Absent; 6];
        for axis in 0..grid.dimension() {
            for positive in [false, true] {
                let mut c = coords;
                let inside = if positive {
                    c[axis] += 1;
                    c[axis] < spec.root_extent[axis]
                } else if c[axis] > 0 {
                    c[axis] -= 1;
                    true
                } else {
                    false
                };
                if inside {
                    let t = spec.root_index(c);
                    neighbors[face_slot(axis, positive)] = Neighbor::Cell(NeighborCell::new(grid, t, 0, 0, [0; 3], false));
                }
            }
        }
        Ok(Self { center, neighbors })
    }

    pub fn to_child(&self, child: usize) -> Result<Self> {
        self.center.to_child(child)?;
        Ok(self.child_unchecked(child))
    }

    pub(crate) fn child_unchecked(&self, child: usize) -> Self {
        let grid = self.center.grid;
        let f = grid.factor();
        let center = self.center.child_unchecked(child);
        let parent_as_neighbor = NeighborCell {
            tree_index: self.center.tree_index,
            bfs_index: self.center.bfs_index,
            depth: self.center.depth,
            position: self.center.position,
            masked: self.center.masked,
            is_leaf: false,
        };
        let mut neighbors = [Neighbor::Absent; 6];
        let mut stride = 1;
        for axis in 0..grid.dimension() {
            let digit = (child / stride) % f;
            for positive in [false, true] {
                let at_edge = if positive { digit == f - 1 } else { digit == 0 };
                let slot = face_slot(axis, positive);
                neighbors[slot] = if !at_edge {
                    let sibling = if positive { child + stride } else { child - stride };
                    Neighbor::Cell(parent_as_neighbor.descend(grid, sibling))
                } else {
                    match self.neighbors[slot] {
                        Neighbor::Absent => Neighbor::Absent,
                        Neighbor::Cell(n) if n.depth == self.center.depth && !n.is_leaf => {
                            // Mirror the child across the shared face.
                            let mirrored = if positive { child - (f - 1) * stride } else { child + (f - 1) * stride };
                            Neighbor::Cell(n.descend(grid, mirrored))
                        }
                        coarser => coarser,
                    }
                };
            }
            stride *= f;
        }
        Self { center, neighbors }
    }

    pub fn center(&self) -> &GeometricCursor<'a> {
        &self.center
    }

    pub fn neighbor(&self, axis: usize, positive: bool) -> &Neighbor {
        &self.neighbors[face_slot(axis, positive)]
    }

    /// The `2d` neighbors, ordered `(axis 0, −), (axis 0, +), (axis 1, −), …`.
    pub fn neighbors(&self) -> &[Neighbor] {
        &self.neighbors[..2 * self.center.grid.dimension()]
    }
}
