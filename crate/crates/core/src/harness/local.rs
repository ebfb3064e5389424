use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{linear_fit, HarnessError, Model};
use crate::graph::WeightedGraph;
use crate::io::rng_from_seed;
use crate::seed;
use crate::tree::{sample_conditioned_gw, Offspring};
use crate::walk::Walker;

/// Fewest exceedances for a grid point to enter the tail fit.
const MIN_FIT_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub lambdas: Vec<f64>,
    pub tail: Vec<f64>,
    pub exceed: Vec<usize>,
    pub replicates: usize,
    /// Fit of `log tail` against `λ` over grid points with at least five exceedances.
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub resid_sd: f64,
    /// Envelope `c_1 e^{−c_2 λ}`: `c_2 = −slope`, `c_1 = exp(intercept + 3 resid_sd)`.
    pub c1: f64,
    pub c2: f64,
    /// Grid points where the empirical tail exceeds the envelope.
    pub violations: usize,
}

fn bfs(g: &WeightedGraph<f64>, s: usize, radius: usize) -> Vec<(usize, usize)> {
    let mut dist = vec![usize::MAX; g.n_vertices()];
    dist[s] = 0;
    let mut order = vec![(s, 0)];
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if dist[x] == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                order.push((y, dist[y]));
                queue.push_back(y);
            }
        }
    }
    order
}

/// Fluctuation statistic `r^{−1} sup_{t ≤ rmT} |L_t(y) − L_t(z)| / √(d(y, z)/r)` for one
/// conditioned tree and one uniform pair `y ≠ z`, from a walk started at the root.
fn fluctuation(offspring: &Offspring, n: usize, horizon: f64, seed: u64) -> Result<f64, HarnessError> {
    let t = sample_conditioned_gw(offspring, n, seed!(seed; "tree"))?;
    let g = t.to_graph()?;
    let r = g.hop_diameter() as f64;
    let m: f64 = (0..g.n_vertices()).map(|x| g.vertex_weight(x)).sum();
    let mut rng = rng_from_seed(seed!(seed; "pair"));
    let y = rng.random_range(0..g.n_vertices());
    let mut z = rng.random_range(0..g.n_vertices() - 1);
    if z >= y {
        z += 1;
    }
    let d = t.metric().distance(y, z) as f64;
    let (my, mz) = (g.vertex_weight(y), g.vertex_weight(z));
    let steps = (r * m * horizon).ceil() as u64;
    let mut walker = Walker::new(&g, t.root(), seed!(seed; "walk"))?;
    let (mut cy, mut cz) = (0u64, 0u64);
    let mut worst = 0.0f64;
    let mut x = t.root();
    for _ in 0..steps {
        // the difference only moves when y or z is occupied
        if x == y {
            cy += 1;
        } else if x == z {
            cz += 1;
        }
        worst = worst.max((cy as f64 / my - cz as f64 / mz).abs());
        x = walker.step();
    }
    Ok(worst / r / (d / r).sqrt())
}

/// Empirical tail of the local-time fluctuation over a `λ` grid, with an
/// exponential fit and the envelope violation count.
pub fn concentration_check(
    offspring: &Offspring,
    n: usize,
    lambdas: &[f64],
    replicates: usize,
    horizon: f64,
    seed: u64,
) -> Result<ConcentrationTable, HarnessError> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| w[0] >= w[1]) || lambdas[0] < 0.0 {
        return Err(HarnessError::InvalidPlan("lambda grid must be nonnegative and increasing".into()));
    }
    if n < 1 || replicates == 0 {
        return Err(HarnessError::InvalidPlan("need a tree with an edge and at least one replicate".into()));
    }
    let stats: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| fluctuation(offspring, n, horizon, seed!(seed; "concentration", i)))
        .collect::<Result<_, _>>()?;
    let exceed: Vec<usize> = lambdas.iter().map(|&l| stats.iter().filter(|&&s| s >= l).count()).collect();
    let tail: Vec<f64> = exceed.iter().map(|&k| k as f64 / replicates as f64).collect();
    let (x, y): (Vec<f64>, Vec<f64>) =
        lambdas.iter().zip(&tail).zip(&exceed).filter(|(_, &k)| k >= MIN_FIT_COUNT).map(|((&l, &p), _)| (l, p.ln())).unzip();
    let fit = linear_fit(&x, &y).ok_or_else(|| HarnessError::DegenerateFit("fewer than three grid points with enough exceedances".into()))?;
    let c1 = (fit.intercept + 3.0 * fit.resid_sd).exp();
    let c2 = -fit.slope;
    let violations = lambdas.iter().zip(&tail).filter(|(&l, &p)| p > c1 * (-c2 * l).exp()).count();
    Ok(ConcentrationTable {
        lambdas: lambdas.to_vec(),
        tail,
        exceed,
        replicates,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        resid_sd: fit.resid_sd,
        c1,
        c2,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub n: usize,
    pub epsilon: f64,
    pub deltas: Vec<f64>,
    pub probability: Vec<f64>,
    pub exceed: Vec<usize>,
    pub replicates: usize,
    /// Samples whose modulus decreased somewhere along the `δ` grid (always 0).
    pub monotonicity_violations: usize,
}

/// Local times sampled on this many equally spaced times in `[0, T]`.
pub const MODULUS_CHECKPOINTS: usize = 64;

/// `sup_{α d(y,z) < δ} sup_t α |L_{βt}(y) − L_{βt}(z)|` for each `δ`, on one instance.
fn modulus(model: &Model, n: usize, deltas: &[f64], horizon: f64, seed: u64) -> Result<Vec<f64>, HarnessError> {
    let (g, start) = model.graph(n, seed!(seed; "instance"))?;
    let regime = model.regime();
    let (alpha, beta) = (regime.alpha(n), regime.beta(n));
    let v = g.n_vertices();
    let steps = (beta * horizon).ceil() as usize;
    let marks: Vec<usize> = (1..=MODULUS_CHECKPOINTS).map(|k| (k * steps).div_ceil(MODULUS_CHECKPOINTS)).collect();
    let mut counts = vec![0u64; v];
    let mut local = Vec::with_capacity(MODULUS_CHECKPOINTS);
    let mut walker = Walker::new(&g, start, seed!(seed; "walk"))?;
    let mut x = start;
    let mut done = 0;
    for &mark in &marks {
        while done < mark {
            counts[x] += 1;
            x = walker.step();
            done += 1;
        }
        local.push((0..v).map(|y| alpha * counts[y] as f64 / g.vertex_weight(y)).collect::<Vec<f64>>());
    }
    // α d < δ ⇔ d < δ/α; hop counts below the largest threshold
    let limit = |d: f64| (d / alpha).ceil() as usize;
    let radius = limit(*deltas.last().unwrap()).saturating_sub(1);
    let mut best = vec![0.0f64; deltas.len()];
    for y in 0..v {
        let ball = bfs(&g, y, radius);
        for l in &local {
            let mut run = 0.0f64;
            let mut k = 0;
            for &(z, d) in &ball {
                while k < deltas.len() && d >= limit(deltas[k]) {
                    best[k] = best[k].max(run);
                    k += 1;
                }
                run = run.max((l[y] - l[z]).abs());
            }
            for b in &mut best[k..] {
                *b = b.max(run);
            }
        }
    }
    Ok(best)
}

/// Probability that the rescaled local-time modulus at scale `δ` reaches `ε`,
/// for each `δ` in an increasing grid.
pub fn equicontinuity_modulus(
    model: &Model,
    n: usize,
    deltas: &[f64],
    epsilon: f64,
    horizon: f64,
    replicates: usize,
    seed: u64,
) -> Result<ModulusTable, HarnessError> {
    if deltas.is_empty() || deltas[0] <= 0.0 || deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidPlan("delta grid must be positive and increasing".into()));
    }
    let samples: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| modulus(model, n, deltas, horizon, seed!(seed; "modulus", n, i)))
        .collect::<Result<_, _>>()?;
    let exceed: Vec<usize> = (0..deltas.len()).map(|k| samples.iter().filter(|s| s[k] >= epsilon).count()).collect();
    Ok(ModulusTable {
        n,
        epsilon,
        deltas: deltas.to_vec(),
        probability: exceed.iter().map(|&k| k as f64 / replicates as f64).collect(),
        exceed,
        replicates,
        monotonicity_violations: samples.iter().filter(|s| s.windows(2).any(|w| w[0] > w[1])).count(),
    })
}
