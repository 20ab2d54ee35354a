//! Deterministic grid generators.
//!
//! * `paper2d`: d=2, f=2, 2×3 unit roots, depth ≤ 5.
//! * `paper3d`: d=3, f=3, 3×3×2 unit roots, depth ≤ 3.
//! * `uniform(d,f,k)`: one unit root fully refined to depth k.
//! * `random(d,f,k)`: 1–3 roots per axis with irregular spacing.
//!
//! `paper2d`/`paper3d` refine a cell at depth δ with probability
//! `0.7 · 0.8^δ`, drawing in breadth-first order tree by tree from a
//! ChaCha8 stream seeded with `seed`. Masks come from an independent stream,
//! so the masked and unmasked variants share the same trees.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cursor::GeometricCursor;
use crate::grid::{GridSpec, HyperTreeGrid, MaterialMask};
use crate::tree::HyperTree;
use crate::{Error, Result};

const MASK_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalGrid {
    Paper2d,
    Paper3d,
    Uniform { dimension: usize, factor: usize, depth: usize },
    Random { dimension: usize, factor: usize, depth: usize },
}

impl FromStr for CanonicalGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownCanonicalGrid(s.to_string());
        match s.trim() {
            "paper2d" => return Ok(CanonicalGrid::Paper2d),
            "paper3d" => return Ok(CanonicalGrid::Paper3d),
            _ => {}
        }
        let (head, rest) = s.trim().split_once('(').ok_or_else(unknown)?;
        let args = rest.strip_suffix(')').ok_or_else(unknown)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| unknown())?;
        let [dimension, factor, depth] = nums[..] else {
            return Err(unknown());
        };
        match head {
            "uniform" => Ok(CanonicalGrid::Uniform { dimension, factor, depth }),
            "random" => Ok(CanonicalGrid::Random { dimension, factor, depth }),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for CanonicalGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalGrid::Paper2d => write!(f, "paper2d"),
            CanonicalGrid::Paper3d => write!(f, "paper3d"),
            CanonicalGrid::Uniform { dimension, factor, depth } => write!(f, "uniform({dimension},{factor},{depth})"),
            CanonicalGrid::Random { dimension, factor, depth } => write!(f, "random({dimension},{factor},{depth})"),
        }
    }
}

/// Parameters for [`random_grid`].
#[derive(Clone, Debug)]
pub struct RandomGridParams {
    pub dimension: usize,
    pub factor: usize,
    pub max_depth: usize,
    pub root_extent: Vec<usize>,
    pub refine_probability: f64,
    /// Probability that any cell, coarse or leaf, carries a mask bit.
    pub mask_probability: f64,
}

pub fn generate(grid: CanonicalGrid, seed: u64, mask_density: f64) -> Result<HyperTreeGrid> {
    if !(0.0..=1.0).contains(&mask_density) {
        return Err(Error::Parse(format!("mask density {mask_density} outside [0, 1]")));
    }
    match grid {
        CanonicalGrid::Paper2d => paper_grid(GridSpec::unit(2, 2, &[2, 3]), 5, seed, mask_density),
        CanonicalGrid::Paper3d => paper_grid(GridSpec::unit(3, 3, &[3, 3, 2]), 3, seed, mask_density),
        CanonicalGrid::Uniform { dimension, factor, depth } => uniform(dimension, factor, depth, seed, mask_density),
        CanonicalGrid::Random { dimension, factor, depth } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let root_extent = (0..dimension).map(|_| rng.random_range(1..=3)).collect();
            let params = RandomGridParams {
                dimension,
                factor,
                max_depth: depth,
                root_extent,
                refine_probability: 0.5,
                mask_probability: mask_density,
            };
            random_grid(&mut rng, &params)
        }
    }
}

/// Breadth-first bits for one tree, refining at depth δ with probability `p(δ)`.
fn grow_tree(rng: &mut impl Rng, children: usize, max_depth: usize, p: impl Fn(usize) -> f64) -> Vec<bool> {
    let mut bits = Vec::new();
    let mut count = 1;
    let mut depth = 0;
    while count > 0 {
        let mut refined = 0;
        for _ in 0..count {
            let b = depth < max_depth && rng.random_bool(p(depth));
            refined += b as usize;
            bits.push(b);
        }
        count = refined * children;
        depth += 1;
    }
    bits
}

fn paper_grid(spec: GridSpec, max_depth: usize, seed: u64, mask_density: f64) -> Result<HyperTreeGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let children = spec.children_per_cell();
    let trees: Vec<HyperTree> = (0..spec.root_count())
        .map(|_| {
            let bits = grow_tree(&mut rng, children, max_depth, |d| 0.7 * 0.8f64.powi(d as i32));
            HyperTree::from_bits(&bits, children).expect("generated tree is consistent")
        })
        .collect();
    let mask = leaf_mask(&trees, seed, mask_density);
    let grid = HyperTreeGrid::from_trees(spec, trees, mask, BTreeMap::new())?;
    with_geometry_fields(grid)
}

fn uniform(dimension: usize, factor: usize, depth: usize, seed: u64, mask_density: f64) -> Result<HyperTreeGrid> {
    let spec = GridSpec::unit(dimension, factor, &vec![1; dimension]);
    spec.validate()?;
    let children = spec.children_per_cell();
    let mut bits = Vec::new();
    let mut count = 1usize;
    for d in 0..=depth {
        bits.extend(std::iter::repeat_n(d < depth, count));
        count *= children;
    }
    let trees = vec![HyperTree::from_bits(&bits, children).expect("uniform tree is consistent")];
    let mask = leaf_mask(&trees, seed, mask_density);
    HyperTreeGrid::from_trees(spec, trees, mask, BTreeMap::new())
}

/// Masks each leaf independently with probability `density`; `None` when zero.
fn leaf_mask(trees: &[HyperTree], seed: u64, density: f64) -> Option<MaterialMask> {
    if density <= 0.0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ MASK_STREAM);
    let bits = trees
        .iter()
        .flat_map(|t| t.bits().collect::<Vec<_>>())
        .map(|refined| !refined && rng.random_bool(density))
        .collect();
    Some(MaterialMask::new(bits))
}

/// Adds `level` (cell depth) and `distance` (cell center to domain center).
fn with_geometry_fields(grid: HyperTreeGrid) -> Result<HyperTreeGrid> {
    let n = grid.total_cells();
    let mut level = vec![0.0; n];
    let mut distance = vec![0.0; n];
    let (lo, hi) = grid.spec().bounds();
    let mid: Vec<f64> = (0..3).map(|a| (lo[a] + hi[a]) / 2.0).collect();
    let mut stack: Vec<GeometricCursor> = (0..grid.tree_count()).map(|t| GeometricCursor::root(&grid, t)).collect::<Result<_>>()?;
    while let Some(c) = stack.pop() {
        let id = c.global_id();
        level[id] = c.depth() as f64;
        let (o, u) = (c.origin(), c.upper());
        distance[id] = (0..3).map(|a| ((o[a] + u[a]) / 2.0 - mid[a]).powi(2)).sum::<f64>().sqrt();
        stack.extend(c.children());
    }
    let fields = BTreeMap::from([("distance".to_string(), distance), ("level".to_string(), level)]);
    HyperTreeGrid::from_trees(grid.spec().clone(), grid.trees().to_vec(), grid.mask().cloned(), fields)
}

/// Random rectilinear grid with irregular root spacing, for property tests.
pub fn random_grid(rng: &mut impl Rng, params: &RandomGridParams) -> Result<HyperTreeGrid> {
    let axis_coordinates = params
        .root_extent
        .iter()
        .map(|&n| {
            let mut x = rng.random_range(-2.0..2.0);
            let mut coords = vec![x];
            for _ in 0..n {
                x += rng.random_range(0.25..1.75);
                coords.push(x);
            }
            coords
        })
        .collect();
    let spec = GridSpec {
        dimension: params.dimension,
        factor: params.factor,
        root_extent: params.root_extent.clone(),
        axis_coordinates,
    };
    spec.validate()?;
    let children = spec.children_per_cell();
    let trees: Vec<HyperTree> = (0..spec.root_count())
        .map(|_| {
            let bits = grow_tree(rng, children, params.max_depth, |_| params.refine_probability);
            HyperTree::from_bits(&bits, children).expect("generated tree is consistent")
        })
        .collect();
    let total: usize = trees.iter().map(HyperTree::cell_count).sum();
    let mask = (params.mask_probability > 0.0)
        .then(|| MaterialMask::new((0..total).map(|_| rng.random_bool(params.mask_probability)).collect()));
    let level = trees.iter().flat_map(|t| (0..t.cell_count()).map(|i| t.depth_of(i) as f64)).collect();
    HyperTreeGrid::from_trees(spec, trees, mask, BTreeMap::from([("level".to_string(), level)]))
}
