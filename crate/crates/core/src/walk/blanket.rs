use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{TransitionTable, WalkError, WalkPath, Walker};
use crate::graph::WeightedGraph;
use crate::scalar::Real;
use crate::seed;

/// The blanket predicate `m^G · count(x) ≥ ε · t · μ_x`, evaluated the same way everywhere.
#[inline]
fn blanketed(total_mass: f64, count: u64, eps: f64, t: u64, mu: f64) -> bool {
    total_mass * count as f64 >= eps * t as f64 * mu
}

/// Min segment tree over per-vertex deadlines.
#[derive(Debug, Clone)]
struct MinTree {
    size: usize,
    nodes: Vec<u64>,
}

impl MinTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        let mut nodes = vec![u64::MAX; 2 * size];
        for i in 0..n {
            nodes[size + i] = 0;
        }
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i].min(nodes[2 * i + 1]);
        }
        Self { size, nodes }
    }

    #[inline]
    fn set(&mut self, i: usize, v: u64) {
        let mut k = self.size + i;
        self.nodes[k] = v;
        while k > 1 {
            k /= 2;
            let m = self.nodes[2 * k].min(self.nodes[2 * k + 1]);
            if self.nodes[k] == m {
                break;
            }
            self.nodes[k] = m;
        }
    }

    #[inline]
    fn min(&self) -> u64 {
        self.nodes[1]
    }
}

/// Incremental detector for the blanket and cover conditions.
///
/// Each vertex carries a deadline: the last `t` at which its current count
/// still satisfies the blanket predicate (0 while unvisited). A deadline
/// changes only when its vertex is visited, so the condition at time `t`
/// is `min deadline ≥ t`, a single lookup.
#[derive(Debug, Clone)]
pub struct BlanketDetector {
    eps: f64,
    total_mass: f64,
    mu: Vec<f64>,
    counts: Vec<u64>,
    unvisited: usize,
    t: u64,
    deadlines: MinTree,
    cover: Option<u64>,
    blanket: Option<u64>,
}

impl BlanketDetector {
    pub fn new<R: Real>(g: &WeightedGraph<R>, eps: f64) -> Result<Self, WalkError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(WalkError::InvalidEpsilon(eps));
        }
        let n = g.n_vertices();
        let mu: Vec<f64> = (0..n).map(|x| g.vertex_weight(x).to_f64_lossy()).collect();
        let total_mass = mu.iter().sum();
        Ok(Self {
            eps,
            total_mass,
            mu,
            counts: vec![0; n],
            unvisited: n,
            t: 0,
            deadlines: MinTree::new(n),
            cover: None,
            blanket: None,
        })
    }

    fn deadline(&self, x: usize) -> u64 {
        let c = self.counts[x];
        if c == 0 {
            return 0;
        }
        let (m, eps, mu) = (self.total_mass, self.eps, self.mu[x]);
        let est = (m * c as f64 / (eps * mu)).floor();
        let mut d = if est >= (u64::MAX / 4) as f64 { u64::MAX / 4 } else { est as u64 };
        // agree exactly with the predicate despite rounding in the estimate
        while blanketed(m, c, eps, d + 1, mu) {
            d += 1;
        }
        while d > 0 && !blanketed(m, c, eps, d, mu) {
            d -= 1;
        }
        d
    }

    /// Appends `X_{t}` and returns whether the blanket condition holds at the new `t + 1`.
    #[inline]
    pub fn record(&mut self, x: usize) -> bool {
        if self.counts[x] == 0 {
            self.unvisited -= 1;
        }
        self.counts[x] += 1;
        self.t += 1;
        let d = self.deadline(x);
        self.deadlines.set(x, d);
        if self.cover.is_none() && self.unvisited == 0 {
            self.cover = Some(self.t);
        }
        if self.blanket.is_none() && self.deadlines.min() >= self.t {
            self.blanket = Some(self.t);
        }
        self.blanket.is_some()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn cover_time(&self) -> Option<u64> {
        self.cover
    }

    pub fn blanket_time(&self) -> Option<u64> {
        self.blanket
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// One blanket-time draw. `None` in either time field means the budget ran out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlanketTimeResult {
    pub epsilon: f64,
    pub tau_blanket: Option<u64>,
    pub cover_time: Option<u64>,
    pub seed: u64,
    pub t_max: u64,
}

impl BlanketTimeResult {
    pub fn timed_out(&self) -> bool {
        self.tau_blanket.is_none()
    }
}

/// Default step budget: `64 n^{3/2}` on trees, `64 n · diameter` otherwise.
pub fn default_t_max<R: Real>(g: &WeightedGraph<R>) -> u64 {
    let n = g.n_vertices() as f64;
    if g.is_tree() {
        (64.0 * n.powf(1.5)).ceil() as u64
    } else {
        64 * g.n_vertices() as u64 * g.hop_diameter().max(1) as u64
    }
}

/// Simulates one walk from `start` until the blanket condition holds at `epsilon` or `t_max` is reached.
pub fn blanket_time_variable<R: Real>(
    g: &WeightedGraph<R>,
    start: usize,
    epsilon: f64,
    t_max: u64,
    seed: u64,
) -> Result<BlanketTimeResult, WalkError> {
    blanket_with_table(g, &TransitionTable::new(g), start, epsilon, t_max, seed)
}

fn blanket_with_table<R: Real>(
    g: &WeightedGraph<R>,
    table: &TransitionTable,
    start: usize,
    epsilon: f64,
    t_max: u64,
    seed: u64,
) -> Result<BlanketTimeResult, WalkError> {
    Ok(blanket_times_with_table(g, table, start, &[epsilon], t_max, seed)?.remove(0))
}

/// Blanket times at several `ε` on one shared trajectory.
pub fn blanket_times_multi<R: Real>(
    g: &WeightedGraph<R>,
    start: usize,
    epsilons: &[f64],
    t_max: u64,
    seed: u64,
) -> Result<Vec<BlanketTimeResult>, WalkError> {
    blanket_times_with_table(g, &TransitionTable::new(g), start, epsilons, t_max, seed)
}

fn blanket_times_with_table<R: Real>(
    g: &WeightedGraph<R>,
    table: &TransitionTable,
    start: usize,
    epsilons: &[f64],
    t_max: u64,
    seed: u64,
) -> Result<Vec<BlanketTimeResult>, WalkError> {
    if t_max == 0 {
        return Err(WalkError::ZeroBudget);
    }
    let mut detectors = epsilons.iter().map(|&e| BlanketDetector::new(g, e)).collect::<Result<Vec<_>, _>>()?;
    let mut walker = Walker::with_table(g, table.clone(), start, seed)?;
    let mut x = start;
    for t in 1..=t_max {
        let mut pending = 0;
        for d in detectors.iter_mut().filter(|d| d.blanket_time().is_none()) {
            if !d.record(x) {
                pending += 1;
            }
        }
        if pending == 0 || t == t_max {
            break;
        }
        x = walker.step();
    }
    Ok(detectors
        .into_iter()
        .zip(epsilons)
        .map(|(d, &epsilon)| BlanketTimeResult {
            epsilon,
            tau_blanket: d.blanket_time(),
            cover_time: d.cover_time(),
            seed,
            t_max,
        })
        .collect())
}

/// Blanket time of a recorded path; `None` if the path ends first.
pub fn blanket_time_of_path<R: Real>(g: &WeightedGraph<R>, path: &WalkPath, epsilon: f64) -> Result<Option<u64>, WalkError> {
    let mut d = BlanketDetector::new(g, epsilon)?;
    for &x in &path.steps {
        if d.record(x) {
            return Ok(d.blanket_time());
        }
    }
    Ok(None)
}

/// First `t` such that every vertex occurs among `X_0, …, X_{t−1}`; `None` on timeout.
pub fn cover_time<R: Real>(g: &WeightedGraph<R>, start: usize, t_max: u64, seed: u64) -> Result<Option<u64>, WalkError> {
    if t_max == 0 {
        return Err(WalkError::ZeroBudget);
    }
    let n = g.n_vertices();
    let mut walker = Walker::new(g, start, seed)?;
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut remaining = n - 1;
    let mut t = 1;
    while remaining > 0 {
        if t >= t_max {
            return Ok(None);
        }
        let x = walker.step();
        t += 1;
        if !seen[x] {
            seen[x] = true;
            remaining -= 1;
        }
    }
    Ok(Some(t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartEstimate {
    pub start: usize,
    pub mean: f64,
    pub stderr: f64,
    pub completed: usize,
    pub timeouts: usize,
}

/// Monte Carlo estimate of `t_bl(ε) = max_x E_x τ_bl(ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlanketEstimate {
    pub epsilon: f64,
    pub replicates: usize,
    pub per_start: Vec<StartEstimate>,
    pub t_bl: f64,
    pub argmax: usize,
}

/// Estimates `E_x τ_bl(ε)` from every start vertex.
pub fn expected_blanket_time<R: Real>(
    g: &WeightedGraph<R>,
    epsilon: f64,
    replicates: usize,
    t_max: u64,
    master_seed: u64,
) -> Result<BlanketEstimate, WalkError> {
    let starts: Vec<usize> = (0..g.n_vertices()).collect();
    expected_blanket_time_from(g, &starts, epsilon, replicates, t_max, master_seed)
}

/// As [`expected_blanket_time`], restricted to `starts`. Replicate `i` from `x`
/// uses the seed derived from `(master_seed, "blanket", x, i)`.
pub fn expected_blanket_time_from<R: Real>(
    g: &WeightedGraph<R>,
    starts: &[usize],
    epsilon: f64,
    replicates: usize,
    t_max: u64,
    master_seed: u64,
) -> Result<BlanketEstimate, WalkError> {
    if replicates == 0 {
        return Err(WalkError::ZeroReplicates);
    }
    let table = TransitionTable::new(g);
    let mut per_start = Vec::with_capacity(starts.len());
    let mut total_timeouts = 0;
    for &start in starts {
        let draws: Vec<Option<u64>> = (0..replicates)
            .into_par_iter()
            .map(|i| {
                let s = seed!(master_seed; "blanket", start, i);
                blanket_with_table(g, &table, start, epsilon, t_max, s).map(|r| r.tau_blanket)
            })
            .collect::<Result<_, _>>()?;
        let done: Vec<f64> = draws.iter().flatten().map(|&t| t as f64).collect();
        let timeouts = replicates - done.len();
        total_timeouts += timeouts;
        let k = done.len() as f64;
        let mean = if done.is_empty() { f64::NAN } else { done.iter().sum::<f64>() / k };
        let stderr = if done.len() > 1 {
            (done.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            0.0
        };
        per_start.push(StartEstimate { start, mean, stderr, completed: done.len(), timeouts });
    }
    let total = replicates * starts.len();
    if total_timeouts * 100 > total {
        return Err(WalkError::TooManyTimeouts { timeouts: total_timeouts, replicates: total });
    }
    let best = per_start
        .iter()
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("at least one start");
    Ok(BlanketEstimate { epsilon, replicates, t_bl: best.mean, argmax: best.start, per_start })
}
