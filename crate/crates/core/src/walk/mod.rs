//! Discrete-time weighted random walks and their local times.
//!
//! From `x` the walk moves to `y` with probability `μ_xy/μ_x`. Transition
//! sampling uses one alias table per vertex with non-uniform weights and a
//! plain uniform draw otherwise. A self-loop occupies two slots in the
//! neighbor list, so it is taken with probability `2μ_xx/μ_x`.
//!
//! Local times use the left-endpoint convention: `L_t(x)` is the number of
//! visits to `x` among `X_0, …, X_{t−1}`, divided by `μ_x`. Hence
//! `Σ_x μ_x L_t(x) = t`.

mod blanket;
mod smooth;

pub use blanket::{
    blanket_time_of_path, blanket_time_variable, blanket_times_multi, cover_time, default_t_max,
    expected_blanket_time, expected_blanket_time_from, BlanketDetector, BlanketEstimate, BlanketTimeResult,
    StartEstimate,
};
pub use smooth::smoothed_occupation;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::io::{rng_from_seed, LabRng};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("start vertex {start} outside 0..{n}")]
    StartOutOfRange { start: usize, n: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("at least one replicate is required")]
    ZeroReplicates,
    #[error("time {t} exceeds path length {len}")]
    PathTooShort { t: usize, len: usize },
    #[error("no vertex within distance {delta} of {x}")]
    EmptyKernel { x: usize, delta: f64 },
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("{timeouts} of {replicates} replicates timed out (limit 1%)")]
    TooManyTimeouts { timeouts: usize, replicates: usize },
}

/// Per-vertex transition sampler built once per graph.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    alias: Vec<Option<WeightedAliasIndex<f64>>>,
}

impl TransitionTable {
    pub fn new<R: Real>(g: &WeightedGraph<R>) -> Self {
        let alias = (0..g.n_vertices())
            .map(|x| {
                let w = g.neighbor_weights(x);
                if w.iter().all(|&v| v == w[0]) {
                    None
                } else {
                    let w64 = w.iter().map(|v| v.to_f64_lossy()).collect();
                    Some(WeightedAliasIndex::new(w64).expect("positive finite weights"))
                }
            })
            .collect();
        Self { alias }
    }

    #[inline]
    pub fn step<R, G: Rng + ?Sized>(&self, g: &WeightedGraph<R>, x: usize, rng: &mut G) -> usize
    where
        R: Real,
    {
        let nbrs = g.neighbors(x);
        let i = match &self.alias[x] {
            None => rng.random_range(0..nbrs.len()),
            Some(a) => a.sample(rng),
        };
        nbrs[i]
    }
}

/// A running walk: graph, transition table, generator and current position.
#[derive(Debug, Clone)]
pub struct Walker<'g, R> {
    graph: &'g WeightedGraph<R>,
    table: TransitionTable,
    rng: LabRng,
    position: usize,
}

impl<'g, R: Real> Walker<'g, R> {
    pub fn new(graph: &'g WeightedGraph<R>, start: usize, seed: u64) -> Result<Self, WalkError> {
        Self::with_table(graph, TransitionTable::new(graph), start, seed)
    }

    /// Reuses a prebuilt table (it must belong to `graph`).
    pub fn with_table(graph: &'g WeightedGraph<R>, table: TransitionTable, start: usize, seed: u64) -> Result<Self, WalkError> {
        let n = graph.n_vertices();
        if start >= n {
            return Err(WalkError::StartOutOfRange { start, n });
        }
        Ok(Self { graph, table, rng: rng_from_seed(seed), position: start })
    }

    #[inline]
    pub fn position(&self) -> usize {
        self.position
    }

    #[inline]
    pub fn step(&mut self) -> usize {
        self.position = self.table.step(self.graph, self.position, &mut self.rng);
        self.position
    }

    pub fn graph(&self) -> &'g WeightedGraph<R> {
        self.graph
    }
}

/// Trajectory `X_0, …, X_T` of one walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub start: usize,
    pub steps: Vec<usize>,
    pub seed: u64,
}

impl WalkPath {
    /// Number of transitions `T`.
    pub fn horizon(&self) -> usize {
        self.steps.len() - 1
    }

    /// Every consecutive pair is an edge of `g`.
    pub fn is_valid_for<R: Real>(&self, g: &WeightedGraph<R>) -> bool {
        self.steps.first() == Some(&self.start)
            && self.steps.windows(2).all(|w| g.neighbors(w[0]).contains(&w[1]))
    }
}

/// Simulates `horizon` steps from `start`.
pub fn run_walk<R: Real>(g: &WeightedGraph<R>, start: usize, horizon: usize, seed: u64) -> Result<WalkPath, WalkError> {
    let mut w = Walker::new(g, start, seed)?;
    let mut steps = Vec::with_capacity(horizon + 1);
    steps.push(start);
    for _ in 0..horizon {
        steps.push(w.step());
    }
    Ok(WalkPath { start, steps, seed })
}

/// Integer visit counts with local times materialized on demand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalTimeField {
    counts: Vec<u64>,
    mu: Vec<f64>,
    t: u64,
}

impl LocalTimeField {
    pub fn new<R: Real>(g: &WeightedGraph<R>) -> Self {
        let mu = (0..g.n_vertices()).map(|x| g.vertex_weight(x).to_f64_lossy()).collect();
        Self { counts: vec![0; g.n_vertices()], mu, t: 0 }
    }

    /// Field at time `t` of `path` (visits in `X_0..X_{t−1}`).
    pub fn from_path<R: Real>(g: &WeightedGraph<R>, path: &WalkPath, t: usize) -> Result<Self, WalkError> {
        if t > path.steps.len() {
            return Err(WalkError::PathTooShort { t, len: path.steps.len() });
        }
        let mut f = Self::new(g);
        for &x in &path.steps[..t] {
            f.record(x);
        }
        Ok(f)
    }

    #[inline]
    pub fn record(&mut self, x: usize) {
        self.counts[x] += 1;
        self.t += 1;
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn count(&self, x: usize) -> u64 {
        self.counts[x]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `L_t(x) = count(x)/μ_x`.
    pub fn value(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.mu[x]
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|x| self.value(x)).collect()
    }

    /// Integer form of `Σ_x μ_x L_t(x) = t`.
    pub fn occupation_identity_holds(&self) -> bool {
        self.counts.iter().sum::<u64>() == self.t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Edge;

    #[test]
    fn k2_alternates() {
        let p = run_walk(&k2(), 0, 4, 99).unwrap();
        assert_eq!(p.steps, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn empty_walk() {
        let p = run_walk(&triangle(), 2, 0, 1).unwrap();
        assert_eq!(p.steps, vec![2]);
        assert_eq!(p.horizon(), 0);
    }

    #[test]
    fn start_checked() {
        assert_eq!(run_walk(&k2(), 5, 1, 0).unwrap_err(), WalkError::StartOutOfRange { start: 5, n: 2 });
    }

    #[test]
    fn triangle_transition_frequencies() {
        let g = triangle();
        let p = run_walk(&g, 0, 100_000, 11).unwrap();
        assert!(p.is_valid_for(&g));
        let mut from0 = [0usize; 3];
        for w in p.steps.windows(2) {
            if w[0] == 0 {
                from0[w[1]] += 1;
            }
        }
        let total = (from0[1] + from0[2]) as f64;
        assert_eq!(from0[0], 0);
        assert!((from0[1] as f64 / total - 0.5).abs() < 0.01);
    }

    #[test]
    fn weighted_transitions_follow_conductances() {
        let g = WeightedGraph::<f64>::from_edges(3, vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 3.0)]).unwrap();
        let p = run_walk(&g, 0, 200_000, 5).unwrap();
        let (mut a, mut b) = (0usize, 0usize);
        for w in p.steps.windows(2) {
            match (w[0], w[1]) {
                (0, 1) => a += 1,
                (0, 2) => b += 1,
                _ => {}
            }
        }
        assert!((b as f64 / (a + b) as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn local_time_field_identity() {
        let g = path(4);
        let p = run_walk(&g, 0, 500, 3).unwrap();
        let f = LocalTimeField::from_path(&g, &p, 300).unwrap();
        assert!(f.occupation_identity_holds());
        let total: f64 = (0..5).map(|x| g.vertex_weight(x) * f.value(x)).sum();
        assert!((total - 300.0).abs() < 1e-9);
    }
}
