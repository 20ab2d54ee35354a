#![allow(dead_code)]

pub mod oracle;

use htg_core::generate::{random_grid, RandomGridParams};
use htg_core::HyperTreeGrid;
use rand::Rng;

/// Random grid with 1–3 roots per axis. The refinement probability keeps the
/// expected branching per cell between 0.5 and 2.5 children.
pub fn random(rng: &mut impl Rng, dimension: usize, factor: usize, max_depth: usize, mask_probability: f64) -> HyperTreeGrid {
    let root_extent = (0..dimension).map(|_| rng.random_range(1..=3)).collect();
    let children = factor.pow(dimension as u32) as f64;
    let refine_probability = rng.random_range(0.5 / children..2.5 / children);
    let params = RandomGridParams { dimension, factor, max_depth, root_extent, refine_probability, mask_probability };
    random_grid(rng, &params).unwrap()
}
