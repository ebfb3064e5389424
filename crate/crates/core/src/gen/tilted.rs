use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;

use super::{unit_graph, GenError};
use crate::graph::WeightedGraph;
use crate::io::{rng_from_seed, LabRng};
use crate::tree::{depth_first_walk_and_area, permitted_edges, PlaneTree};

/// Smallest accepted SIR pool.
pub const MIN_POOL: usize = 1000;
const MIN_ESS: f64 = 10.0;

/// Uniform labelled tree on `0..m` (Prüfer decoding), rooted at 0 with children sorted by label.
pub fn uniform_labelled_tree(m: usize, rng: &mut LabRng) -> PlaneTree {
    if m == 1 {
        return PlaneTree::single_vertex();
    }
    if m == 2 {
        return PlaneTree::from_edge_list(2, &[(0, 1)], 0).unwrap();
    }
    let code: Vec<usize> = (0..m - 2).map(|_| rng.random_range(0..m)).collect();
    let mut degree = vec![1usize; m];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..m).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(m - 1);
    for &c in &code {
        let Reverse(leaf) = leaves.pop().unwrap();
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(Reverse(c));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    PlaneTree::from_edge_list(m, &edges, 0).unwrap()
}

/// A draw from the area-tilted tree law with its importance-sampling diagnostics.
#[derive(Debug, Clone)]
pub struct TiltedTree {
    pub tree: PlaneTree,
    pub area: usize,
    pub ess: f64,
}

/// Labelled tree on `m` vertices with `P(T) ∝ (1 − p)^{−a(T)}`, by sampling-importance-resampling
/// from `pool_size` uniform labelled trees.
pub fn sample_tilted_tree(m: usize, p: f64, seed: u64, pool_size: usize) -> Result<TiltedTree, GenError> {
    if m < 2 {
        return Err(GenError::TooSmall(m));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(GenError::InvalidProbability(p));
    }
    if pool_size < MIN_POOL {
        return Err(GenError::PoolTooSmall(pool_size, MIN_POOL));
    }
    let mut rng = rng_from_seed(seed);
    let pool: Vec<(PlaneTree, usize)> = (0..pool_size)
        .map(|_| {
            let t = uniform_labelled_tree(m, &mut rng);
            let a = depth_first_walk_and_area(&t).area;
            (t, a)
        })
        .collect();
    let tilt = -(-p).ln_1p();
    let max_area = pool.iter().map(|x| x.1).max().unwrap();
    let weights: Vec<f64> = pool.iter().map(|&(_, a)| ((a as f64 - max_area as f64) * tilt).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let ess = sum * sum / sum_sq;
    if ess < MIN_ESS {
        return Err(GenError::DegenerateWeights { ess });
    }
    let pick = WeightedIndex::new(&weights).expect("positive weights").sample(&mut rng);
    let (tree, area) = pool.into_iter().nth(pick).unwrap();
    Ok(TiltedTree { tree, area, ess })
}

#[derive(Debug, Clone)]
pub struct ConnectedSample {
    pub graph: WeightedGraph<f64>,
    pub surplus: usize,
    pub ess: f64,
}

/// Connected graph with the law of `G(m, p)` conditioned on connectivity: a tilted tree plus
/// each permitted edge independently with probability `p`. The SIR step makes this exact only
/// as the pool grows.
pub fn sample_connected_gmp(m: usize, p: f64, seed: u64, pool_size: usize) -> Result<ConnectedSample, GenError> {
    let tilted = sample_tilted_tree(m, p, seed, pool_size)?;
    let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut pairs = tilted.tree.edges();
    let mut surplus = 0;
    for e in permitted_edges(&tilted.tree) {
        if rng.random::<f64>() < p {
            pairs.push(e);
            surplus += 1;
        }
    }
    let graph = unit_graph(m, &pairs, false)?;
    Ok(ConnectedSample { graph, surplus, ess: tilted.ess })
}
