//! Critical random-graph ensembles.

mod admissible;
mod config;
mod er;
mod prescribed;
mod tilted;

pub use admissible::{admissible_pairs, count_admissible_tuples, sample_admissible_tuple, GluePlan, MAX_GLUE_SURPLUS};
pub use config::{sample_configuration_model, sample_degree_sequence, DegreeLaw, DegreeSequence};
pub use er::{er_critical_probability, sample_er, sample_er_critical};
pub use prescribed::{glue_tree, sample_prescribed_connected, PrescribedSample};
pub use tilted::{sample_connected_gmp, sample_tilted_tree, uniform_labelled_tree, ConnectedSample, TiltedTree, MIN_POOL};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, GraphError, WeightedGraph};
use crate::scalar::Real;
use crate::tree::TreeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("edge probability {0} outside (0, 1)")]
    InvalidProbability(f64),
    #[error("importance weights degenerate (effective sample size {ess:.2} < 10)")]
    DegenerateWeights { ess: f64 },
    #[error("pool size {0} is too small (minimum {1})")]
    PoolTooSmall(usize, usize),
    #[error("degree sum {0} is odd")]
    OddDegreeSum(usize),
    #[error("no tree in the pool has an admissible {0}-tuple")]
    NoAdmissibleTuples(usize),
    #[error("infeasible surplus: {0}")]
    InfeasibleSurplus(String),
    #[error("surplus {0} exceeds the supported maximum {1}")]
    SurplusTooLarge(usize, usize),
    #[error("invalid degree law: {0}")]
    InvalidDegreeLaw(String),
    #[error("size {0} is too small")]
    TooSmall(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Component sizes and surpluses, largest first (ties by smallest member).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSpectrum {
    pub sizes: Vec<usize>,
    pub surpluses: Vec<usize>,
    /// Members of each component in increasing order, aligned with `sizes`.
    pub members: Vec<Vec<usize>>,
    /// Index into `sizes` for every vertex.
    pub membership: Vec<usize>,
}

/// Components by union-find; surplus is `edges − vertices + 1` per component.
pub fn components_with_surplus<R: Real>(g: &WeightedGraph<R>) -> ComponentSpectrum {
    let n = g.n_vertices();
    let mut uf = UnionFind::new(n);
    for e in g.edges() {
        uf.union(e.u, e.v);
    }
    let roots: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        by_root[roots[x]].push(x);
    }
    let mut edge_count = vec![0usize; n];
    for e in g.edges() {
        edge_count[roots[e.u]] += 1;
    }
    let mut comps: Vec<(Vec<usize>, usize)> = by_root
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(r, m)| {
            let surplus = edge_count[r] + 1 - m.len();
            (m, surplus)
        })
        .collect();
    comps.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0[0].cmp(&b.0[0])));
    let mut membership = vec![0; n];
    for (i, (m, _)) in comps.iter().enumerate() {
        for &x in m {
            membership[x] = i;
        }
    }
    ComponentSpectrum {
        sizes: comps.iter().map(|c| c.0.len()).collect(),
        surpluses: comps.iter().map(|c| c.1).collect(),
        members: comps.into_iter().map(|c| c.0).collect(),
        membership,
    }
}

/// The largest component as a connected graph with vertices relabelled `0..k`
/// in increasing original order, plus the original ids. `None` if it is a single vertex.
pub fn largest_component<R: Real>(g: &WeightedGraph<R>) -> Option<(WeightedGraph<R>, Vec<usize>)> {
    let spec = components_with_surplus(g);
    let members = spec.members.into_iter().next()?;
    if members.len() < 2 {
        return None;
    }
    let sub = g.induced_subgraph(&members).ok()?;
    Some((sub, members))
}

/// Unit-weight graph (multigraph if requested) from a pair list, connectivity not required.
pub(crate) fn unit_graph(n: usize, pairs: &[(usize, usize)], multigraph: bool) -> Result<WeightedGraph<f64>, GenError> {
    let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v, 1.0)).collect();
    Ok(WeightedGraph::possibly_disconnected(n, edges, multigraph)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_plus_isolated() {
        let g = unit_graph(4, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        let s = components_with_surplus(&g);
        assert_eq!(s.sizes, vec![3, 1]);
        assert_eq!(s.surpluses, vec![1, 0]);
        assert_eq!(s.members[1], vec![3]);
        assert_eq!(s.membership, vec![0, 0, 0, 1]);
    }

    #[test]
    fn forest_has_zero_surplus() {
        let g = unit_graph(6, &[(0, 1), (2, 3), (3, 4)], false).unwrap();
        let s = components_with_surplus(&g);
        assert_eq!(s.sizes, vec![3, 2, 1]);
        assert!(s.surpluses.iter().all(|&x| x == 0));
    }

    #[test]
    fn ties_by_smallest_vertex() {
        let g = unit_graph(4, &[(2, 3), (0, 1)], false).unwrap();
        let s = components_with_surplus(&g);
        assert_eq!(s.members, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn largest_relabelled() {
        let g = unit_graph(5, &[(3, 4), (4, 2), (0, 1)], false).unwrap();
        let (c, ids) = largest_component(&g).unwrap();
        assert_eq!(ids, vec![2, 3, 4]);
        assert_eq!(c.n_edges(), 2);
        assert!(c.is_connected());
    }
}
