use serde::{Deserialize, Serialize};

use super::{CompareError, FiniteMetric};
use crate::graph::MetricMatrix;

/// Largest support for the exact max-flow evaluation.
pub const PROKHOROV_EXACT_LIMIT: usize = 60;
/// Largest support accepted at all.
pub const PROKHOROV_SIZE_LIMIT: usize = 1000;
const FLOW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prokhorov {
    pub value: f64,
    /// `false` when the value is a greedy upper bound.
    pub exact: bool,
}

/// Dinic max-flow on a dense bipartite network.
struct Dinic {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), level: vec![0; n], it: vec![0; n] }
    }

    fn add(&mut self, a: usize, b: usize, c: f64) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0.0);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.to[e];
                if self.cap[e] > FLOW_TOL && self.level[w] < 0 {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: f64) -> f64 {
        if v == t {
            return f;
        }
        while self.it[v] < self.adj[v].len() {
            let e = self.adj[v][self.it[v]];
            let w = self.to[e];
            if self.cap[e] > FLOW_TOL && self.level[w] == self.level[v] + 1 {
                let got = self.dfs(w, t, f.min(self.cap[e]));
                if got > 0.0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.it[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

fn support(m: &[f64]) -> Vec<usize> {
    (0..m.len()).filter(|&i| m[i] > 0.0).collect()
}

/// Maximum transport of `mu` into `nu` along pairs at distance `≤ eps`.
fn exact_flow(mu: &[f64], nu: &[f64], sa: &[usize], sb: &[usize], d: &MetricMatrix<f64>, eps: f64) -> f64 {
    let (p, q) = (sa.len(), sb.len());
    let mut net = Dinic::new(p + q + 2);
    let (s, t) = (p + q, p + q + 1);
    for (i, &x) in sa.iter().enumerate() {
        net.add(s, i, mu[x]);
        for (j, &y) in sb.iter().enumerate() {
            if d.get(x, y) <= eps {
                net.add(i, p + j, f64::INFINITY);
            }
        }
    }
    for (j, &y) in sb.iter().enumerate() {
        net.add(p + j, t, nu[y]);
    }
    net.max_flow(s, t)
}

/// A feasible (hence not larger than maximal) transport: closest pairs first.
fn greedy_flow(mu: &[f64], nu: &[f64], pairs: &[(f64, usize, usize)], eps: f64) -> f64 {
    let (mut a, mut b) = (mu.to_vec(), nu.to_vec());
    let mut flow = 0.0;
    for &(dist, x, y) in pairs {
        if dist > eps {
            break;
        }
        let f = a[x].min(b[y]);
        if f > 0.0 {
            a[x] -= f;
            b[y] -= f;
            flow += f;
        }
    }
    flow
}

/// Prokhorov distance between two atomic measures on one finite metric space.
///
/// For fixed `ε` the worst closed set gives `max_A μ(A) − ν(A^ε) = |μ| − F(ε)`
/// where `F` is the max-flow along pairs at distance `≤ ε`; the flow is the same
/// in both directions. `F` only changes at pairwise distances, so the infimal
/// `ε` is found by bisection over them. Above [`PROKHOROV_EXACT_LIMIT`] support
/// points a greedy flow gives an upper bound unless `require_exact`.
pub fn prokhorov_distance(mu: &[f64], nu: &[f64], d: &MetricMatrix<f64>, require_exact: bool) -> Result<Prokhorov, CompareError> {
    let n = d.len();
    if mu.len() != n || nu.len() != n {
        return Err(CompareError::LengthMismatch { expected: n, got: mu.len().max(nu.len()) });
    }
    if mu.iter().chain(nu).any(|&m| !(m >= 0.0 && m.is_finite())) {
        return Err(CompareError::InvalidMeasure);
    }
    let (sa, sb) = (support(mu), support(nu));
    let size = sa.len().max(sb.len());
    if size > PROKHOROV_SIZE_LIMIT || (require_exact && size > PROKHOROV_EXACT_LIMIT) {
        return Err(CompareError::SizeLimitExceeded { size, limit: if require_exact { PROKHOROV_EXACT_LIMIT } else { PROKHOROV_SIZE_LIMIT } });
    }
    Ok(evaluate(mu, nu, d, &sa, &sb, size <= PROKHOROV_EXACT_LIMIT))
}

/// Upper bound from a coupling `(x, y, mass)`: the least `ε` with `mass{d(x, y) > ε} ≤ ε`.
pub fn prokhorov_coupling_bound<M: FiniteMetric + ?Sized>(coupling: &[(usize, usize, f64)], d: &M) -> f64 {
    let mut pairs: Vec<(f64, f64)> = coupling.iter().map(|&(x, y, m)| (d.dist(x, y), m)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut tail: f64 = pairs.iter().map(|p| p.1).sum();
    let mut level = 0.0;
    let mut i = 0;
    loop {
        while i < pairs.len() && pairs[i].0 <= level {
            tail -= pairs[i].1;
            i += 1;
        }
        let tail_here = if i == pairs.len() { 0.0 } else { tail.max(0.0) };
        let next = pairs.get(i).map_or(f64::INFINITY, |p| p.0);
        if tail_here < next {
            return level.max(tail_here);
        }
        level = next;
    }
}

fn evaluate(mu: &[f64], nu: &[f64], d: &MetricMatrix<f64>, sa: &[usize], sb: &[usize], exact: bool) -> Prokhorov {
    let top = mu.iter().sum::<f64>().max(nu.iter().sum::<f64>());
    let mut pairs: Vec<(f64, usize, usize)> = sa.iter().flat_map(|&x| sb.iter().map(move |&y| (d.get(x, y), x, y))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut levels: Vec<f64> = std::iter::once(0.0).chain(pairs.iter().map(|p| p.0)).collect();
    levels.dedup();
    let gap = |r: usize| -> f64 {
        let flow = if exact { exact_flow(mu, nu, sa, sb, d, levels[r]) } else { greedy_flow(mu, nu, &pairs, levels[r]) };
        let g = top - flow;
        // flows accumulate in a different order than `top`
        if g <= 1e-12 * top {
            0.0
        } else {
            g
        }
    };
    // first level r with gap(r) < next level; monotone in r
    let next = |r: usize| levels.get(r + 1).copied().unwrap_or(f64::INFINITY);
    let lo_gap = gap(0);
    if lo_gap < next(0) {
        return Prokhorov { value: lo_gap, exact };
    }
    // the last level is always feasible since its successor is infinite
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let mut hi_gap = gap(hi);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let g = gap(mid);
        if g < next(mid) {
            hi = mid;
            hi_gap = g;
        } else {
            lo = mid;
        }
    }
    Prokhorov { value: levels[hi].max(hi_gap), exact }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MetricKind;

    fn line(points: &[f64]) -> MetricMatrix<f64> {
        MetricMatrix::from_fn(MetricKind::ShortestPath, points.len(), |i, j| (points[i] - points[j]).abs())
    }

    #[test]
    fn identical_measures() {
        let d = line(&[0.0, 0.3, 1.7]);
        let m = [0.2, 0.5, 0.3];
        assert_eq!(prokhorov_distance(&m, &m, &d, true).unwrap().value, 0.0);
    }

    #[test]
    fn diracs() {
        for gap in [0.1, 0.7, 1.0, 2.5] {
            let d = line(&[0.0, gap]);
            let v = prokhorov_distance(&[1.0, 0.0], &[0.0, 1.0], &d, true).unwrap().value;
            assert!((v - gap.min(1.0)).abs() < 1e-12, "{gap}: {v}");
        }
    }

    #[test]
    fn coupling_bound_dominates_exact() {
        let d = line(&[0.0, 0.05, 0.5, 2.0]);
        let coupling = [(0, 1, 0.4), (2, 2, 0.3), (3, 2, 0.3)];
        let mu = [0.4, 0.0, 0.3, 0.3];
        let nu = [0.0, 0.4, 0.6, 0.0];
        let exact = prokhorov_distance(&mu, &nu, &d, true).unwrap().value;
        let bound = prokhorov_coupling_bound(&coupling, &d);
        assert!((bound - 0.3).abs() < 1e-12, "{bound}");
        assert!(bound >= exact - 1e-12);
        assert_eq!(prokhorov_coupling_bound(&[(0, 0, 1.0)], &d), 0.0);
    }

    #[test]
    fn greedy_is_an_upper_bound() {
        let pts: Vec<f64> = (0..160).map(|i| ((i * 37) % 101) as f64 / 50.0).collect();
        let d = line(&pts);
        let mu: Vec<f64> = (0..160).map(|i| if i % 2 == 0 { 1.0 / 80.0 } else { 0.0 }).collect();
        let nu: Vec<f64> = (0..160).map(|i| if i % 2 == 1 { 1.0 / 80.0 } else { 0.0 }).collect();
        let g = prokhorov_distance(&mu, &nu, &d, false).unwrap();
        assert!(!g.exact);
        let (sa, sb) = (support(&mu), support(&nu));
        let e = evaluate(&mu, &nu, &d, &sa, &sb, true);
        assert!(g.value >= e.value - 1e-12);
        assert!(matches!(prokhorov_distance(&mu, &nu, &d, true), Err(CompareError::SizeLimitExceeded { .. })));
    }
}
