//! Finite weighted graphs viewed as electrical networks.
//!
//! A [`WeightedGraph`] stores symmetric positive conductances `μ_xy` in
//! compressed adjacency form. Vertex ids are dense integers `0..n`. Edge
//! lengths used by the shortest-path metric are resistances `1/μ_xy`, so on a
//! tree the shortest-path and effective-resistance metrics coincide.

mod energy;
mod format;
mod measure;
mod metric;

pub use energy::{dirichlet_energy, effective_resistance, resistance_potential, ResistanceSolve};
pub use format::{parse_graph, write_graph, GraphStats};
pub use measure::{stationary_measure, VertexMeasure};
pub use metric::{graph_metric, LazyMetric, MetricKind, MetricMatrix};

use std::collections::VecDeque;

use thiserror::Error;

use crate::scalar::Real;

/// Largest vertex count for which a dense resistance matrix is materialized.
pub const DENSE_RESISTANCE_LIMIT: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has {0} vertices; at least two are required")]
    FewerThanTwoVertices(usize),
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("edge ({u}, {v}) has non-positive weight {weight}")]
    NonpositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0} in a simple graph")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) listed twice in a simple graph")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("vertex function has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("resistance endpoints must differ (got {0} twice)")]
    SameEndpoints(usize),
    #[error("conjugate gradient did not converge after {iterations} iterations (residual {residual:e})")]
    SolverNotConverged { iterations: usize, residual: f64 },
    #[error("dense {kind} matrix requested for {n} vertices (limit {limit})")]
    SizeLimitExceeded { kind: &'static str, n: usize, limit: usize },
    #[error("malformed graph file at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Undirected weighted edge `{u, v}` with conductance `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<R> {
    pub u: usize,
    pub v: usize,
    pub weight: R,
}

impl<R> Edge<R> {
    pub fn new(u: usize, v: usize, weight: R) -> Self {
        Self { u, v, weight }
    }
}

/// Finite graph with symmetric positive edge weights.
///
/// Adjacency is stored in CSR form. A self-loop at `x` appears twice in the
/// neighbor list of `x`, so that `μ_x` counts its weight twice and the walk's
/// transition probabilities follow half-edge accounting.
#[derive(Debug, Clone)]
pub struct WeightedGraph<R> {
    n: usize,
    edges: Vec<Edge<R>>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<R>,
    multigraph: bool,
    components: usize,
}

impl<R: Real> WeightedGraph<R> {
    /// Validated connected simple graph; the `build_graph` operation.
    pub fn from_edges(n: usize, edges: Vec<Edge<R>>) -> Result<Self, GraphError> {
        let g = Self::assemble(n, edges, false)?;
        g.require_connected()?;
        Ok(g)
    }

    /// Connected multigraph: self-loops and parallel edges are kept.
    pub fn multigraph_from_edges(n: usize, edges: Vec<Edge<R>>) -> Result<Self, GraphError> {
        let g = Self::assemble(n, edges, true)?;
        g.require_connected()?;
        Ok(g)
    }

    /// Same validation as [`from_edges`](Self::from_edges) except connectivity; used by
    /// random-graph generators whose output is a union of components.
    pub fn possibly_disconnected(n: usize, edges: Vec<Edge<R>>, multigraph: bool) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::FewerThanTwoVertices(n));
        }
        Self::assemble_inner(n, edges, multigraph)
    }

    /// Unit-weight simple graph from `(u, v)` pairs.
    pub fn unit(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::from_edges(n, pairs.iter().map(|&(u, v)| Edge::new(u, v, R::one())).collect())
    }

    fn assemble(n: usize, edges: Vec<Edge<R>>, multigraph: bool) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::FewerThanTwoVertices(n));
        }
        if edges.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }
        Self::assemble_inner(n, edges, multigraph)
    }

    fn assemble_inner(n: usize, edges: Vec<Edge<R>>, multigraph: bool) -> Result<Self, GraphError> {
        let mut degree = vec![0usize; n];
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(GraphError::VertexOutOfRange { u: e.u, v: e.v, n });
            }
            if !(e.weight > R::zero()) || !e.weight.is_finite() {
                return Err(GraphError::NonpositiveWeight { u: e.u, v: e.v, weight: e.weight.to_f64_lossy() });
            }
            if e.u == e.v && !multigraph {
                return Err(GraphError::SelfLoop(e.u));
            }
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; total];
        let mut weights = vec![R::zero(); total];
        for e in &edges {
            targets[cursor[e.u]] = e.v;
            weights[cursor[e.u]] = e.weight;
            cursor[e.u] += 1;
            targets[cursor[e.v]] = e.u;
            weights[cursor[e.v]] = e.weight;
            cursor[e.v] += 1;
        }
        if !multigraph {
            let mut seen = vec![usize::MAX; n];
            for x in 0..n {
                for &y in &targets[offsets[x]..offsets[x + 1]] {
                    if seen[y] == x {
                        return Err(GraphError::DuplicateEdge(x.min(y), x.max(y)));
                    }
                    seen[y] = x;
                }
            }
        }
        let mut g = Self { n, edges, offsets, targets, weights, multigraph, components: 0 };
        g.components = g.count_components();
        Ok(g)
    }

    fn require_connected(&self) -> Result<(), GraphError> {
        if self.components != 1 {
            return Err(GraphError::DisconnectedGraph { components: self.components });
        }
        Ok(())
    }

    fn count_components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<R>] {
        &self.edges
    }

    pub fn is_multigraph(&self) -> bool {
        self.multigraph
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// True for connected simple graphs with `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        !self.multigraph && self.is_connected() && self.edges.len() + 1 == self.n
    }

    #[inline]
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.targets[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub fn neighbor_weights(&self, x: usize) -> &[R] {
        &self.weights[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// `μ_x`, the total conductance at `x` (self-loops counted twice).
    pub fn vertex_weight(&self, x: usize) -> R {
        self.neighbor_weights(x).iter().copied().sum()
    }

    /// Conductance between `x` and `y`, summed over parallel edges.
    pub fn weight_between(&self, x: usize, y: usize) -> R {
        let mut total = R::zero();
        for (&t, &w) in self.neighbors(x).iter().zip(self.neighbor_weights(x)) {
            if t == y {
                total += w;
            }
        }
        if x == y {
            total / R::lit(2.0)
        } else {
            total
        }
    }

    /// True when every edge has the same weight as the first one.
    pub fn has_uniform_weights(&self) -> bool {
        let w0 = self.edges[0].weight;
        self.edges.iter().all(|e| e.weight == w0)
    }

    /// Copy with every weight converted to another scalar type.
    pub fn cast<S: Real>(&self) -> WeightedGraph<S> {
        WeightedGraph {
            n: self.n,
            edges: self.edges.iter().map(|e| Edge::new(e.u, e.v, S::lit(e.weight.to_f64_lossy()))).collect(),
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            weights: self.weights.iter().map(|w| S::lit(w.to_f64_lossy())).collect(),
            multigraph: self.multigraph,
            components: self.components,
        }
    }

    /// Copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: R) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight *= factor;
        }
        for w in &mut g.weights {
            *w *= factor;
        }
        g
    }

    /// Same vertex set with one extra edge; used for Rayleigh monotonicity checks.
    pub fn with_extra_edge(&self, edge: Edge<R>) -> Result<Self, GraphError> {
        let mut edges = self.edges.clone();
        edges.push(edge);
        let g = Self::assemble(self.n, edges, self.multigraph)?;
        g.require_connected()?;
        Ok(g)
    }

    /// Per-vertex component labels (labels are the smallest vertex id in each component).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in self.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = s;
                        queue.push_back(y);
                    }
                }
            }
        }
        label
    }

    /// Induced subgraph on `vertices` (relabelled `0..k` in the given order).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.u] != usize::MAX && index[e.v] != usize::MAX)
            .map(|e| Edge::new(index[e.u], index[e.v], e.weight))
            .collect();
        let g = Self::assemble(vertices.len(), edges, self.multigraph)?;
        g.require_connected()?;
        Ok(g)
    }

    /// Hop-count eccentricity-based diameter via BFS from every vertex.
    pub fn hop_diameter(&self) -> usize {
        let mut best = 0;
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                best = best.max(dist[x]);
                for &y in self.neighbors(x) {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn k2() -> WeightedGraph<f64> {
        WeightedGraph::unit(2, &[(0, 1)]).unwrap()
    }

    pub fn triangle() -> WeightedGraph<f64> {
        WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    pub fn path(k: usize) -> WeightedGraph<f64> {
        let pairs: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        WeightedGraph::unit(k + 1, &pairs).unwrap()
    }

    pub fn star(leaves: usize) -> WeightedGraph<f64> {
        let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        WeightedGraph::unit(leaves + 1, &pairs).unwrap()
    }
}
