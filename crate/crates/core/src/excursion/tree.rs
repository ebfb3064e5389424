use super::{Excursion, ExcursionError};
use crate::graph::{Edge, MetricKind, MetricMatrix, WeightedGraph};
use crate::tree::{range_min, sparse_table};

/// The real tree coded by an excursion, restricted to finitely many sampled
/// times and the branch points between them.
///
/// Points are grid indices in increasing order; each point belongs to one
/// representative (points at distance 0 are merged). Representative 0 is the root.
#[derive(Debug, Clone)]
pub struct DiscretizedContinuumTree {
    source: Excursion,
    zeta: f64,
    dt: f64,
    points: Vec<usize>,
    point_heights: Vec<f64>,
    point_rep: Vec<usize>,
    table: Vec<Vec<u32>>,
    first_point: Vec<usize>,
    heights: Vec<f64>,
    parent: Vec<Option<usize>>,
    masses: Vec<f64>,
}

/// Samples the grid times `round(j·N/K)` for `j < K` (including the root at 0),
/// adds the minimiser between consecutive samples, and quotients by `d = 0`.
/// Each sampled time carries mass `ζ/K`; branch points carry none.
pub fn excursion_to_tree(e: &Excursion, n_leaves: usize) -> Result<DiscretizedContinuumTree, ExcursionError> {
    let n = e.n();
    if n_leaves == 0 || n_leaves > n {
        return Err(ExcursionError::ResolutionTooCoarse { n_leaves, n });
    }
    let values = e.values();
    let grid_table = sparse_table(&values);
    let argmin = |a: usize, b: usize| crate::tree::range_argmin(&grid_table, &values, a, b);

    let samples: Vec<usize> = (0..n_leaves)
        .map(|j| ((j as f64 * n as f64 / n_leaves as f64).round() as usize).min(n - 1))
        .collect();
    let mut points: Vec<(usize, bool)> = samples.iter().map(|&s| (s, true)).collect();
    for w in samples.windows(2) {
        if w[1] > w[0] + 1 {
            points.push((argmin(w[0], w[1]), false));
        }
    }
    points.sort();
    // a time can be sampled more than once when K is close to N, and can be both sample and branch point
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(points.len());
    for (p, sampled) in points {
        let add = usize::from(sampled);
        match merged.last_mut() {
            Some(last) if last.0 == p => last.1 += add,
            _ => merged.push((p, add)),
        }
    }

    let unit_mass = e.zeta() / n_leaves as f64;
    let mut heights = Vec::new();
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut masses = Vec::new();
    let mut first_point = Vec::new();
    let mut point_rep = Vec::with_capacity(merged.len());
    let mut stack: Vec<usize> = Vec::new();
    for (k, &(p, count)) in merged.iter().enumerate() {
        let v = values[p];
        let mut popped = Vec::new();
        while let Some(&top) = stack.last() {
            if heights[top] > v {
                popped.push(stack.pop().unwrap());
            } else {
                break;
            }
        }
        let rep = match stack.last() {
            Some(&top) if heights[top] == v => top,
            _ => {
                heights.push(v);
                parent.push(None);
                masses.push(0.0);
                first_point.push(k);
                let r = heights.len() - 1;
                stack.push(r);
                r
            }
        };
        for (i, &x) in popped.iter().enumerate() {
            parent[x] = Some(if i + 1 < popped.len() { popped[i + 1] } else { rep });
        }
        masses[rep] += count as f64 * unit_mass;
        point_rep.push(rep);
    }
    for w in stack.windows(2) {
        parent[w[1]] = Some(w[0]);
    }
    let point_heights: Vec<f64> = merged.iter().map(|&(p, _)| values[p]).collect();
    let table = sparse_table(&point_heights);
    Ok(DiscretizedContinuumTree {
        source: e.clone(),
        zeta: e.zeta(),
        dt: e.dt(),
        points: merged.into_iter().map(|x| x.0).collect(),
        point_heights,
        point_rep,
        table,
        first_point,
        heights,
        parent,
        masses,
    })
}

impl DiscretizedContinuumTree {
    pub fn n_representatives(&self) -> usize {
        self.heights.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn source(&self) -> &Excursion {
        &self.source
    }

    pub fn height(&self, r: usize) -> f64 {
        self.heights[r]
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn parent(&self, r: usize) -> Option<usize> {
        self.parent[r]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Grid index of the first point in the class of `r`.
    pub fn grid_index(&self, r: usize) -> usize {
        self.points[self.first_point[r]]
    }

    /// `e(s) + e(t) − 2 min_{[s,t]} e` between representatives.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let (i, j) = (self.first_point[a], self.first_point[b]);
        let m = range_min(&self.table, &self.point_heights, i.min(j), i.max(j));
        self.heights[a] + self.heights[b] - 2.0 * m
    }

    pub fn metric_matrix(&self) -> MetricMatrix<f64> {
        MetricMatrix::from_fn(MetricKind::Resistance, self.n_representatives(), |a, b| self.distance(a, b))
    }

    /// Representative of the point nearest to time `t` (the projection `p_e`).
    pub fn project(&self, t: f64) -> usize {
        let s = t / self.dt;
        let k = self.points.partition_point(|&p| (p as f64) < s);
        let best = if k == 0 {
            0
        } else if k == self.points.len() {
            k - 1
        } else if (self.points[k] as f64 - s) < (s - self.points[k - 1] as f64) {
            k
        } else {
            k - 1
        };
        self.point_rep[best]
    }

    /// The ancestor of `r` whose height is nearest to `x` (ties toward the root).
    pub fn ancestor_at_height(&self, r: usize, x: f64) -> usize {
        let mut path = vec![r];
        let mut v = r;
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        // heights increase along the root path
        let k = path.partition_point(|&q| self.heights[q] <= x + 1e-9);
        if k == 0 {
            return path[0];
        }
        if k == path.len() {
            return path[k - 1];
        }
        let (lo, hi) = (path[k - 1], path[k]);
        if self.heights[hi] - x < x - self.heights[lo] {
            hi
        } else {
            lo
        }
    }

    /// Normalized times `grid index / N` of all points with their representatives.
    pub fn parameterization(&self) -> (Vec<f64>, Vec<usize>) {
        let n = self.source.n() as f64;
        (self.points.iter().map(|&p| p as f64 / n).collect(), self.point_rep.clone())
    }

    /// Tree edges `(parent, child, length)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_representatives())
            .filter_map(|r| self.parent[r].map(|p| (p, r, self.heights[r] - self.heights[p])))
            .collect()
    }

    /// Total edge length.
    pub fn length(&self) -> f64 {
        self.edges().iter().map(|e| e.2).sum()
    }

    /// Electrical network of the tree: conductance `1/length` on each edge.
    pub fn to_graph(&self) -> Result<WeightedGraph<f64>, ExcursionError> {
        let edges = self.edges().into_iter().map(|(p, c, l)| Edge::new(p, c, 1.0 / l)).collect();
        Ok(WeightedGraph::from_edges(self.n_representatives(), edges)?)
    }

    /// Largest violation of the four-point condition over the given quadruples.
    pub fn four_point_violation(&self, quads: &[[usize; 4]]) -> f64 {
        quads
            .iter()
            .map(|&[x, y, z, w]| {
                let mut s = [
                    self.distance(x, y) + self.distance(z, w),
                    self.distance(x, z) + self.distance(y, w),
                    self.distance(x, w) + self.distance(y, z),
                ];
                s.sort_by(|a, b| a.partial_cmp(b).unwrap());
                (s[2] - s[1]).max(0.0)
            })
            .fold(0.0, f64::max)
    }
}
