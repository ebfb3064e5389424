//! Rooted plane trees, their random ensembles and their encodings.
//!
//! A [`PlaneTree`] is a rooted tree with an ordered child list at every vertex.
//! Labelled (unordered) trees are represented as plane trees whose child lists
//! are sorted by label, which is the order used by the depth-first exploration.

mod contour;
mod dfs;
mod gw;

pub use contour::{contour_process, holder_norm, ContourPath, HolderNorm, HOLDER_EXACT_LIMIT};
pub use dfs::{depth_first_tree, depth_first_walk_and_area, permitted_edges, LukasiewiczPath};
pub use gw::{cycle_lemma_rotation, sample_conditioned_gw, uniform_plane_tree_with_ecd, Ecd, Offspring, REJECTION_BUDGET};

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Edge, GraphError, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("children distribution is not tenable: {0}")]
    NotTenable(String),
    #[error("offspring law cannot produce a tree with {0} edges")]
    InfeasibleSize(usize),
    #[error("no accepted proposal after {0} attempts")]
    RejectionBudgetExceeded(usize),
    #[error("invalid offspring law: {0}")]
    InvalidOffspring(String),
    #[error("index {index} outside 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("not a valid tree: {0}")]
    Malformed(String),
    #[error("malformed tree file: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl PlaneTree {
    /// Tree from ordered child lists; validates that it is a single rooted tree.
    pub fn from_children(root: usize, children: Vec<Vec<usize>>) -> Result<Self, TreeError> {
        let n = children.len();
        if root >= n {
            return Err(TreeError::Malformed(format!("root {root} outside 0..{n}")));
        }
        let mut parent = vec![None; n];
        let mut has_parent = vec![false; n];
        for (v, cs) in children.iter().enumerate() {
            for &c in cs {
                if c >= n || c == root || has_parent[c] {
                    return Err(TreeError::Malformed(format!("vertex {c} has an invalid parent slot")));
                }
                has_parent[c] = true;
                parent[c] = Some(v);
            }
        }
        let t = Self { parent, children, root };
        if t.preorder().len() != n {
            return Err(TreeError::Malformed("not every vertex is reachable from the root".into()));
        }
        Ok(t)
    }

    /// Tree from a parent array (`None` exactly at the root); children sorted by label.
    pub fn from_parents(parent: &[Option<usize>]) -> Result<Self, TreeError> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::Malformed(format!("{} roots", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(TreeError::Malformed(format!("parent {p} outside 0..{n}")));
                }
                children[p].push(v);
            }
        }
        Self::from_children(roots[0], children)
    }

    /// Tree whose preorder child counts are `seq` (a Łukasiewicz word); vertices are numbered in preorder.
    pub fn from_child_sequence(seq: &[usize]) -> Result<Self, TreeError> {
        let n = seq.len();
        if n == 0 || seq.iter().sum::<usize>() + 1 != n {
            return Err(TreeError::Malformed("child counts must sum to n − 1".into()));
        }
        let mut children = vec![Vec::new(); n];
        // stack of (vertex, children still to attach)
        let mut stack: Vec<(usize, usize)> = vec![(0, seq[0])];
        for (v, &c) in seq.iter().enumerate().skip(1) {
            while let Some(&(_, 0)) = stack.last() {
                stack.pop();
            }
            let top = stack.last_mut().ok_or_else(|| TreeError::Malformed("sequence exhausts early".into()))?;
            top.1 -= 1;
            children[top.0].push(v);
            stack.push((v, c));
        }
        Self::from_children(0, children)
    }

    /// Labelled tree from an undirected edge list on `0..n`, rooted at `root`, children sorted by label.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self, TreeError> {
        if edges.len() + 1 != n {
            return Err(TreeError::Malformed(format!("{} edges for {} vertices", edges.len(), n)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(TreeError::Malformed(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TreeError::Malformed("edge list is not connected".into()));
        }
        Self::from_parents(&parent)
    }

    pub fn single_vertex() -> Self {
        Self { parent: vec![None], children: vec![Vec::new()], root: 0 }
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn n_edges(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Vertices in depth-first (preorder) order, children visited in plane order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.parent.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Child counts in preorder (the Łukasiewicz word).
    pub fn child_sequence(&self) -> Vec<usize> {
        self.preorder().into_iter().map(|v| self.children[v].len()).collect()
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n_vertices()];
        for v in self.preorder() {
            for &c in &self.children[v] {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Copy relabelled so that vertex ids are preorder positions.
    pub fn canonical(&self) -> Self {
        Self::from_child_sequence(&self.child_sequence()).expect("preorder word of a tree is valid")
    }

    /// Shape equality: same Łukasiewicz word.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.child_sequence() == other.child_sequence()
    }

    /// Undirected edges `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n_vertices()).filter_map(|v| self.parent[v].map(|p| (p, v))).collect()
    }

    /// Unit-weight graph on the same vertex ids.
    pub fn to_graph(&self) -> Result<WeightedGraph<f64>, TreeError> {
        let edges = self.edges().into_iter().map(|(u, v)| Edge::new(u, v, 1.0)).collect();
        Ok(WeightedGraph::from_edges(self.n_vertices(), edges)?)
    }

    /// Graph distances by Euler-tour range minimum.
    pub fn metric(&self) -> TreeDistances {
        TreeDistances::new(self)
    }

    /// Parent-array text `n; p_1 … p_{n−1}` of the preorder relabelling (root 0).
    pub fn to_parent_text(&self) -> String {
        let c = self.canonical();
        let mut s = format!("{};", c.n_vertices());
        for v in 1..c.n_vertices() {
            write!(s, " {}", c.parent[v].unwrap()).unwrap();
        }
        s
    }

    /// Parses `n; p_1 … p_{n−1}` (vertex 0 is the root, children ordered by label).
    pub fn parse_parent_text(text: &str) -> Result<Self, TreeError> {
        let (head, tail) = text.trim().split_once(';').ok_or_else(|| TreeError::Parse("missing ';'".into()))?;
        let n: usize = head.trim().parse().map_err(|_| TreeError::Parse(format!("bad vertex count {head:?}")))?;
        let ps: Vec<usize> = tail
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| TreeError::Parse(format!("bad parent {t:?}"))))
            .collect::<Result<_, _>>()?;
        if n == 0 || ps.len() + 1 != n {
            return Err(TreeError::Parse(format!("expected {} parents, found {}", n.saturating_sub(1), ps.len())));
        }
        let mut parent = vec![None];
        parent.extend(ps.into_iter().map(Some));
        Self::from_parents(&parent)
    }
}

/// Constant-time tree distances after `O(n log n)` preprocessing.
#[derive(Debug, Clone)]
pub struct TreeDistances {
    depth: Vec<usize>,
    first: Vec<usize>,
    euler_depth: Vec<usize>,
    sparse: Vec<Vec<u32>>,
}

impl TreeDistances {
    fn new(t: &PlaneTree) -> Self {
        let n = t.n_vertices();
        let depth = t.depths();
        let mut first = vec![0; n];
        let mut euler = Vec::with_capacity(2 * n);
        let mut stack = vec![(t.root(), 0usize)];
        first[t.root()] = 0;
        euler.push(t.root());
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if top.1 < t.children(v).len() {
                let c = t.children(v)[top.1];
                top.1 += 1;
                first[c] = euler.len();
                euler.push(c);
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }
        let euler_depth: Vec<usize> = euler.iter().map(|&v| depth[v]).collect();
        let sparse = sparse_table(&euler_depth);
        Self { depth, first, euler_depth, sparse }
    }

    pub fn lca_depth(&self, u: usize, v: usize) -> usize {
        let (a, b) = {
            let (x, y) = (self.first[u], self.first[v]);
            (x.min(y), x.max(y))
        };
        range_min(&self.sparse, &self.euler_depth, a, b)
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.depth[u] + self.depth[v] - 2 * self.lca_depth(u, v)
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }
}

/// Sparse table of argmin positions for range-minimum queries.
pub(crate) fn sparse_table<T: PartialOrd + Copy>(values: &[T]) -> Vec<Vec<u32>> {
    let n = values.len();
    let mut table = vec![(0..n as u32).collect::<Vec<u32>>()];
    let mut k = 1;
    while (1 << k) <= n {
        let prev = &table[k - 1];
        let half = 1 << (k - 1);
        let row: Vec<u32> = (0..=n - (1 << k))
            .map(|i| {
                let (a, b) = (prev[i], prev[i + half]);
                if values[b as usize] < values[a as usize] {
                    b
                } else {
                    a
                }
            })
            .collect();
        table.push(row);
        k += 1;
    }
    table
}

/// Position of the minimum of `values[a..=b]` (leftmost on ties).
pub(crate) fn range_argmin<T: PartialOrd + Copy>(table: &[Vec<u32>], values: &[T], a: usize, b: usize) -> usize {
    let len = b - a + 1;
    let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
    let (x, y) = (table[k][a], table[k][b + 1 - (1 << k)]);
    if values[y as usize] < values[x as usize] {
        y as usize
    } else {
        x as usize
    }
}

pub(crate) fn range_min<T: PartialOrd + Copy>(table: &[Vec<u32>], values: &[T], a: usize, b: usize) -> T {
    values[range_argmin(table, values, a, b)]
}
