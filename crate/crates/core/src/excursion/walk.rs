use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DiscretizedContinuumTree, ExcursionError};
use crate::io::rng_from_seed;
use crate::seed;
use crate::walk::TransitionTable;

/// Blanket and cover times of the continuum walk approximation, in continuum time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumBlanket {
    pub tau: Option<f64>,
    pub cover: Option<f64>,
    pub jumps: u64,
}

struct MinTree {
    size: usize,
    nodes: Vec<f64>,
}

impl MinTree {
    fn new(init: &[f64]) -> Self {
        let size = init.len().next_power_of_two();
        let mut nodes = vec![f64::INFINITY; 2 * size];
        nodes[size..size + init.len()].copy_from_slice(init);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i].min(nodes[2 * i + 1]);
        }
        Self { size, nodes }
    }

    fn set(&mut self, i: usize, v: f64) {
        let mut k = self.size + i;
        self.nodes[k] = v;
        while k > 1 {
            k /= 2;
            self.nodes[k] = self.nodes[2 * k].min(self.nodes[2 * k + 1]);
        }
    }

    fn min(&self) -> f64 {
        self.nodes[1]
    }
}

/// Walk on the representative tree with conductance `1/length` per edge,
/// holding `ν_x/μ_x` at each visit (`ν` the tree mass, `μ_x` the total
/// conductance at `x`). The local time is `time at x / ν_x`, and the blanket
/// time is the first `t > 0` at which every point of positive mass has local
/// time at least `ε t`. Under `Θ_a` the jump chain is unchanged and every holding
/// time is multiplied by `a^{3/2}`.
pub fn continuum_blanket_time(
    tree: &DiscretizedContinuumTree,
    eps: f64,
    t_max: f64,
    seed: u64,
) -> Result<ContinuumBlanket, ExcursionError> {
    if !(eps > 0.0) {
        return Err(ExcursionError::InvalidParameter { name: "epsilon", value: eps });
    }
    let g = tree.to_graph()?;
    let n = g.n_vertices();
    let table = TransitionTable::new(&g);
    let nu = tree.masses();
    let hold: Vec<f64> = (0..n).map(|x| nu[x] / g.vertex_weight(x)).collect();
    let mut time = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut unvisited = nu.iter().filter(|&&m| m > 0.0).count();
    let init: Vec<f64> = nu.iter().map(|&m| if m > 0.0 { 0.0 } else { f64::INFINITY }).collect();
    let mut deadlines = MinTree::new(&init);
    let mut rng = rng_from_seed(seed);

    let (mut x, mut s) = (tree.root(), 0.0f64);
    let mut cover = None;
    let mut jumps = 0u64;
    while s <= t_max {
        if !seen[x] {
            seen[x] = true;
            if nu[x] > 0.0 {
                unvisited -= 1;
                if unvisited == 0 {
                    cover = Some(s);
                    // Σ ν_x L_x = t, so L ≥ εt everywhere needs ε·|ν| ≤ 1
                    if eps * tree.total_mass() >= 1.0 {
                        return Ok(ContinuumBlanket { tau: None, cover, jumps });
                    }
                }
            }
        }
        let h = hold[x];
        if unvisited == 0 {
            let start = if nu[x] > 0.0 {
                let a = 1.0 - eps * nu[x];
                if a > 0.0 {
                    Some(s.max((s - time[x]) / a))
                } else if time[x] >= eps * nu[x] * s {
                    Some(s)
                } else {
                    None
                }
            } else {
                Some(s)
            };
            if let Some(t) = start {
                if t > 0.0 && t <= s + h {
                    let saved = deadlines.nodes[deadlines.size + x];
                    deadlines.set(x, f64::INFINITY);
                    let others = deadlines.min();
                    deadlines.set(x, saved);
                    if t <= others {
                        return Ok(ContinuumBlanket { tau: Some(t), cover, jumps });
                    }
                }
            }
        }
        time[x] += h;
        if nu[x] > 0.0 {
            deadlines.set(x, time[x] / (nu[x] * eps));
        }
        s += h;
        x = table.step(&g, x, &mut rng);
        jumps += 1;
    }
    Ok(ContinuumBlanket { tau: None, cover, jumps })
}

/// Independent replicates with seeds derived from `master`.
pub fn continuum_blanket_samples(
    tree: &DiscretizedContinuumTree,
    eps: f64,
    replicates: usize,
    t_max: f64,
    master: u64,
) -> Result<Vec<ContinuumBlanket>, ExcursionError> {
    (0..replicates)
        .into_par_iter()
        .map(|i| continuum_blanket_time(tree, eps, t_max, seed!(master; "continuum-blanket", i)))
        .collect()
}
