use rand::Rng;

use super::{PlaneTree, TreeError};
use crate::io::rng_from_seed;

/// Above this many edges the Hölder norm is estimated from random pairs.
pub const HOLDER_EXACT_LIMIT: usize = 4096;
const HOLDER_SAMPLED_PAIRS: usize = 1_000_000;

/// Contour function `V(0..2n)` of a tree with `n` edges, with the vertex visited at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub values: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl ContourPath {
    pub fn n_edges(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    /// `v_n(i/2n) = V(i)/√n` on the grid `i = 0..2n`.
    pub fn normalized(&self) -> Vec<f64> {
        let scale = (self.n_edges().max(1) as f64).sqrt();
        self.values.iter().map(|&v| v as f64 / scale).collect()
    }

    /// `v_n(s)` for real `s ∈ [0, 1]`, linear between grid points.
    pub fn normalized_at(&self, s: f64) -> f64 {
        let m = self.values.len() - 1;
        let scale = (self.n_edges().max(1) as f64).sqrt();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let i = (x.floor() as usize).min(m.saturating_sub(1));
        if m == 0 {
            return 0.0;
        }
        let frac = x - i as f64;
        ((1.0 - frac) * self.values[i] as f64 + frac * self.values[i + 1] as f64) / scale
    }

    /// Vertex occupied at contour step `index` (the canonical projection).
    pub fn projection(&self, index: usize) -> Result<usize, TreeError> {
        self.vertices
            .get(index)
            .copied()
            .ok_or(TreeError::IndexOutOfRange { index, max: self.vertices.len() - 1 })
    }
}

/// Unit-speed left-to-right contour exploration.
pub fn contour_process(t: &PlaneTree) -> ContourPath {
    let n = t.n_edges();
    let mut values = Vec::with_capacity(2 * n + 1);
    let mut vertices = Vec::with_capacity(2 * n + 1);
    let mut stack = vec![(t.root(), 0usize)];
    values.push(0);
    vertices.push(t.root());
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        if top.1 < t.children(v).len() {
            let c = t.children(v)[top.1];
            top.1 += 1;
            stack.push((c, 0));
            values.push(stack.len() - 1);
            vertices.push(c);
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                values.push(stack.len() - 1);
                vertices.push(p);
            }
        }
    }
    ContourPath { values, vertices }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderNorm {
    pub value: f64,
    /// False when computed from sampled pairs (then `value` is a lower bound).
    pub exact: bool,
}

/// `sup |v(s) − v(t)| / |t − s|^α` over grid pairs of the normalized contour.
pub fn holder_norm(p: &ContourPath, alpha: f64) -> HolderNorm {
    let v = p.normalized();
    let m = v.len() - 1;
    if m == 0 {
        return HolderNorm { value: 0.0, exact: true };
    }
    let h = 1.0 / m as f64;
    // |t − s|^{−α} for each lag
    let weight: Vec<f64> = (0..=m).map(|k| if k == 0 { 0.0 } else { (k as f64 * h).powf(-alpha) }).collect();
    if p.n_edges() <= HOLDER_EXACT_LIMIT {
        let mut best: f64 = 0.0;
        for i in 0..m {
            let vi = v[i];
            for j in (i + 1)..=m {
                let r = (v[j] - vi).abs() * weight[j - i];
                if r > best {
                    best = r;
                }
            }
        }
        return HolderNorm { value: best, exact: true };
    }
    let mut rng = rng_from_seed(0x486f6c646572);
    let mut best: f64 = 0.0;
    for _ in 0..HOLDER_SAMPLED_PAIRS {
        let i = rng.random_range(0..=m);
        let j = rng.random_range(0..=m);
        if i != j {
            best = best.max((v[i] - v[j]).abs() * weight[i.abs_diff(j)]);
        }
    }
    // adjacent pairs are the likeliest maximizers at small α; include them all
    for i in 0..m {
        best = best.max((v[i + 1] - v[i]).abs() * weight[1]);
    }
    HolderNorm { value: best, exact: false }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn small_contours() {
        assert_eq!(contour_process(&path_tree(1)).values, vec![0, 1, 0]);
        assert_eq!(contour_process(&path_tree(2)).values, vec![0, 1, 2, 1, 0]);
        assert_eq!(contour_process(&cherry()).values, vec![0, 1, 0, 1, 0]);
        assert_eq!(contour_process(&PlaneTree::single_vertex()).values, vec![0]);
    }

    #[test]
    fn projection() {
        let c = contour_process(&path_tree(1));
        assert_eq!(c.projection(0).unwrap(), 0);
        assert_eq!(c.projection(1).unwrap(), 1);
        assert_eq!(c.projection(3).unwrap_err(), TreeError::IndexOutOfRange { index: 3, max: 2 });
    }

    #[test]
    fn holder_three_point() {
        let c = contour_process(&path_tree(1));
        let h = holder_norm(&c, 0.25);
        assert!(h.exact);
        assert!((h.value - 1.0 / 0.5f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(holder_norm(&contour_process(&PlaneTree::single_vertex()), 0.25).value, 0.0);
    }

    #[test]
    fn holder_nondecreasing_in_alpha() {
        let c = contour_process(&PlaneTree::from_child_sequence(&[2, 1, 0, 2, 0, 0]).unwrap());
        let a = holder_norm(&c, 0.1).value;
        let b = holder_norm(&c, 0.3).value;
        assert!(b >= a);
    }

    #[test]
    fn interpolation() {
        let c = contour_process(&path_tree(1));
        assert!((c.normalized_at(0.25) - 0.5).abs() < 1e-12);
        assert_eq!(c.normalized_at(1.0), 0.0);
    }
}
