use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::energy::{grounded_solve, tree_path_resistance};
use super::{GraphError, WeightedGraph, DENSE_RESISTANCE_LIMIT};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    ShortestPath,
    Resistance,
}

/// Dense symmetric distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix<R> {
    pub kind: MetricKind,
    n: usize,
    values: Vec<R>,
}

impl<R: Real> MetricMatrix<R> {
    /// Wraps a row-major `n × n` matrix without checking the metric axioms.
    pub fn from_rows(kind: MetricKind, n: usize, values: Vec<R>) -> Self {
        assert_eq!(values.len(), n * n, "metric matrix must be n × n");
        Self { kind, n, values }
    }

    pub fn from_fn(kind: MetricKind, n: usize, mut d: impl FnMut(usize, usize) -> R) -> Self {
        let mut values = vec![R::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = if i == j { R::zero() } else { d(i, j) };
            }
        }
        Self { kind, n, values }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn diameter(&self) -> R {
        self.values.iter().copied().fold(R::zero(), R::max)
    }

    /// Smallest strictly positive entry, if any.
    pub fn min_positive(&self) -> Option<R> {
        self.values.iter().copied().filter(|&v| v > R::zero()).reduce(R::min)
    }

    pub fn scaled(&self, factor: R) -> Self {
        Self { kind: self.kind, n: self.n, values: self.values.iter().map(|&v| v * factor).collect() }
    }

    /// Largest violation of symmetry, zero diagonal, nonnegativity or the triangle inequality.
    pub fn axiom_violation(&self) -> R {
        let n = self.n;
        let mut worst = R::zero();
        for i in 0..n {
            worst = worst.max(self.get(i, i).abs());
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
                worst = worst.max(-self.get(i, j));
                for k in 0..n {
                    worst = worst.max(self.get(i, k) - self.get(i, j) - self.get(j, k));
                }
            }
        }
        worst
    }
}

/// Full distance matrix of `g`.
///
/// Edge lengths for the shortest-path kind are `1/μ_xy` (hop counts on unit-weight graphs).
/// Dense resistance matrices are limited to [`DENSE_RESISTANCE_LIMIT`] vertices; use
/// [`LazyMetric`] above that.
pub fn graph_metric<R: Real>(g: &WeightedGraph<R>, kind: MetricKind) -> Result<MetricMatrix<R>, GraphError> {
    let n = g.n_vertices();
    let mut values = vec![R::zero(); n * n];
    match kind {
        MetricKind::ShortestPath => {
            for s in 0..n {
                values[s * n..(s + 1) * n].copy_from_slice(&shortest_paths(g, s));
            }
        }
        MetricKind::Resistance if g.is_tree() => {
            for s in 0..n {
                values[s * n..(s + 1) * n].copy_from_slice(&tree_path_resistance(g, s));
            }
        }
        MetricKind::Resistance => {
            if n > DENSE_RESISTANCE_LIMIT {
                return Err(GraphError::SizeLimitExceeded { kind: "resistance", n, limit: DENSE_RESISTANCE_LIMIT });
            }
            // Green function of the Laplacian grounded at 0: R(a,b) = G_aa + G_bb − 2 G_ab
            let ground = 0;
            let mut green = vec![R::zero(); n * n];
            let mut rhs = vec![R::zero(); n];
            for a in 1..n {
                rhs[a] = R::one();
                let (col, _, _) = grounded_solve(g, ground, &rhs)?;
                rhs[a] = R::zero();
                for x in 0..n {
                    green[x * n + a] = col[x];
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        let v = green[a * n + a] + green[b * n + b] - R::lit(2.0) * green[a * n + b];
                        values[a * n + b] = v.max(R::zero());
                    }
                }
            }
            // symmetrize solver noise
            for a in 0..n {
                for b in (a + 1)..n {
                    let m = (values[a * n + b] + values[b * n + a]) / R::lit(2.0);
                    values[a * n + b] = m;
                    values[b * n + a] = m;
                }
            }
        }
    }
    Ok(MetricMatrix { kind, n, values })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Single-source shortest paths with edge lengths `1/μ_xy`.
pub(crate) fn shortest_paths<R: Real>(g: &WeightedGraph<R>, source: usize) -> Vec<R> {
    let n = g.n_vertices();
    if g.has_uniform_weights() {
        let len = g.edges()[0].weight.recip();
        let mut hops = vec![usize::MAX; n];
        hops[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if hops[y] == usize::MAX {
                    hops[y] = hops[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        return hops
            .into_iter()
            .map(|h| if h == usize::MAX { R::infinity() } else { R::from_usize_lossy(h) * len })
            .collect();
    }
    let mut dist = vec![R::infinity(); n];
    dist[source] = R::zero();
    let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
    while let Some(HeapItem(d, x)) = heap.pop() {
        if d > dist[x].to_f64_lossy() {
            continue;
        }
        for (&y, &w) in g.neighbors(x).iter().zip(g.neighbor_weights(x)) {
            let cand = dist[x] + w.recip();
            if cand < dist[y] {
                dist[y] = cand;
                heap.push(HeapItem(cand.to_f64_lossy(), y));
            }
        }
    }
    dist
}

/// On-demand distances for graphs too large for a dense matrix.
/// Caches the last computed source row.
#[derive(Debug)]
pub struct LazyMetric<'g, R> {
    graph: &'g WeightedGraph<R>,
    kind: MetricKind,
    cached: Option<(usize, Vec<R>)>,
}

impl<'g, R: Real> LazyMetric<'g, R> {
    pub fn new(graph: &'g WeightedGraph<R>, kind: MetricKind) -> Self {
        Self { graph, kind, cached: None }
    }

    pub fn distance(&mut self, a: usize, b: usize) -> Result<R, GraphError> {
        if a == b {
            return Ok(R::zero());
        }
        match self.kind {
            MetricKind::Resistance if !self.graph.is_tree() => super::effective_resistance(self.graph, a, b),
            _ => {
                if self.cached.as_ref().map(|c| c.0) != Some(a) {
                    let row = match self.kind {
                        MetricKind::ShortestPath => shortest_paths(self.graph, a),
                        MetricKind::Resistance => tree_path_resistance(self.graph, a),
                    };
                    self.cached = Some((a, row));
                }
                Ok(self.cached.as_ref().unwrap().1[b])
            }
        }
    }
}
