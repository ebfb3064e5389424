use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{DiscretizedContinuumTree, Excursion, ExcursionError};
use crate::graph::{MetricKind, MetricMatrix};
use crate::io::rng_from_seed;

/// Marked points `(t, x)` under an excursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<(f64, f64)>,
    pub rate: f64,
}

impl PointSet {
    pub fn empty() -> Self {
        Self { points: Vec::new(), rate: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn under(&self, e: &Excursion) -> bool {
        self.points.iter().all(|&(t, x)| t >= 0.0 && t <= e.zeta() && x >= 0.0 && x <= e.at(t) + 1e-12)
    }
}

/// Rate-`c3` Poisson points under the graph of the interpolated excursion:
/// the count is `Poisson(c3 ∫e)`, `t` has density `∝ e(t)` and `x` is uniform on `[0, e(t)]`.
pub fn sample_pointset(e: &Excursion, c3: f64, seed: u64) -> Result<PointSet, ExcursionError> {
    if !(c3 > 0.0 && c3.is_finite()) {
        return Err(ExcursionError::InvalidParameter { name: "c3", value: c3 });
    }
    let mut rng = rng_from_seed(seed);
    let mean = c3 * e.integral();
    let count = Poisson::new(mean).map(|p| p.sample(&mut rng) as usize).unwrap_or(0);
    if count == 0 {
        return Ok(PointSet { points: Vec::new(), rate: c3 });
    }
    let v = e.values();
    let cells: Vec<f64> = v.windows(2).map(|w| w[0] + w[1]).collect();
    let pick = WeightedAliasIndex::new(cells).expect("positive area");
    let dt = e.dt();
    let points = (0..count)
        .map(|_| {
            let i = pick.sample(&mut rng);
            let (a, b) = (v[i], v[i + 1]);
            let u: f64 = rng.random();
            // inverse of the linear density on the cell, written without cancellation
            let s = u * (a + b) / (a + (a * a + (b - a) * (a + b) * u).max(0.0).sqrt());
            let s = s.clamp(0.0, 1.0);
            let t = (i as f64 + s) * dt;
            let h = a + (b - a) * s;
            let x = rng.random::<f64>() * h;
            (t, x)
        })
        .collect();
    Ok(PointSet { points, rate: c3 })
}

/// The tree with finitely many pairs of points identified.
///
/// Distances are shortest paths in the tree augmented by zero-length edges
/// between `u_i` and `v_i`; only the endpoints of identifications can be interior to such
/// a path, so the all-pairs problem reduces to those "portal" points.
#[derive(Debug, Clone)]
pub struct GluedSpace {
    base: DiscretizedContinuumTree,
    identifications: Vec<(usize, usize)>,
    dropped: usize,
    portals: Vec<usize>,
    portal_dist: Vec<f64>,
}

/// Resolves each point to `u = p_e(t)` and `v` = the ancestor of `u` at height `x`,
/// then glues `u` to `v`. Pairs that land on one representative are no-ops.
pub fn glue_continuum(tree: &DiscretizedContinuumTree, ps: &PointSet) -> Result<GluedSpace, ExcursionError> {
    let mut pairs = Vec::with_capacity(ps.len());
    let zeta = tree.zeta();
    for &(t, x) in &ps.points {
        if !(t >= 0.0 && t <= zeta && x >= 0.0) {
            return Err(ExcursionError::UnresolvableIdentification { t, x });
        }
        let h = tree.source().at(t);
        if x > h + 1e-9 * (1.0 + h) {
            return Err(ExcursionError::UnresolvableIdentification { t, x });
        }
        let u = tree.project(t);
        pairs.push((u, tree.ancestor_at_height(u, x)));
    }
    Ok(GluedSpace::new(tree.clone(), pairs))
}

impl GluedSpace {
    /// Glues explicit representative pairs.
    pub fn new(base: DiscretizedContinuumTree, pairs: Vec<(usize, usize)>) -> Self {
        let before = pairs.len();
        let identifications: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
        let dropped = before - identifications.len();
        let mut portals: Vec<usize> = identifications.iter().flat_map(|&(u, v)| [u, v]).collect();
        portals.sort_unstable();
        portals.dedup();
        let p = portals.len();
        let mut d = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                d[i * p + j] = base.distance(portals[i], portals[j]);
            }
        }
        let index = |x: usize| portals.binary_search(&x).unwrap();
        for &(u, v) in &identifications {
            let (i, j) = (index(u), index(v));
            d[i * p + j] = 0.0;
            d[j * p + i] = 0.0;
        }
        for k in 0..p {
            for i in 0..p {
                for j in 0..p {
                    let via = d[i * p + k] + d[k * p + j];
                    if via < d[i * p + j] {
                        d[i * p + j] = via;
                    }
                }
            }
        }
        Self { base, identifications, dropped, portals, portal_dist: d }
    }

    pub fn base(&self) -> &DiscretizedContinuumTree {
        &self.base
    }

    pub fn identifications(&self) -> &[(usize, usize)] {
        &self.identifications
    }

    /// Identifications that collapsed to a single representative.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn n_points(&self) -> usize {
        self.base.n_representatives()
    }

    /// Quasi-metric on representatives.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let mut best = self.base.distance(a, b);
        let p = self.portals.len();
        if p == 0 {
            return best;
        }
        let da: Vec<f64> = self.portals.iter().map(|&x| self.base.distance(a, x)).collect();
        let db: Vec<f64> = self.portals.iter().map(|&x| self.base.distance(x, b)).collect();
        for i in 0..p {
            if da[i] >= best {
                continue;
            }
            for j in 0..p {
                let c = da[i] + self.portal_dist[i * p + j] + db[j];
                if c < best {
                    best = c;
                }
            }
        }
        best
    }

    pub fn metric_matrix(&self) -> MetricMatrix<f64> {
        MetricMatrix::from_fn(MetricKind::ShortestPath, self.n_points(), |a, b| self.distance(a, b))
    }

    /// Push-forward of the tree measure; identified points keep their own atoms.
    pub fn masses(&self) -> &[f64] {
        self.base.masses()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::{excursion_to_tree, sample_excursion};

    #[test]
    fn empty_pointset_keeps_metric() {
        let e = sample_excursion(1.0, 256, 1).unwrap();
        let t = excursion_to_tree(&e, 30).unwrap();
        let g = glue_continuum(&t, &PointSet::empty()).unwrap();
        for a in 0..t.n_representatives() {
            for b in 0..t.n_representatives() {
                assert_eq!(g.distance(a, b), t.distance(a, b));
            }
        }
    }

    #[test]
    fn single_identification() {
        let e = sample_excursion(1.0, 256, 2).unwrap();
        let t = excursion_to_tree(&e, 40).unwrap();
        let g = GluedSpace::new(t.clone(), vec![(3, 17)]);
        assert_eq!(g.distance(3, 17), 0.0);
        assert!(t.distance(3, 17) > 0.0);
        for a in 0..t.n_representatives() {
            for b in 0..t.n_representatives() {
                assert!(g.distance(a, b) <= t.distance(a, b));
            }
        }
        assert!(g.metric_matrix().axiom_violation() < 1e-12);
    }

    #[test]
    fn points_under_graph() {
        let e = sample_excursion(2.0, 512, 4).unwrap();
        for s in 0..20 {
            let ps = sample_pointset(&e, 3.0, s).unwrap();
            assert!(ps.under(&e));
            let t = excursion_to_tree(&e, 64).unwrap();
            let g = glue_continuum(&t, &ps).unwrap();
            assert_eq!(g.identifications().len() + g.dropped(), ps.len());
            assert!((g.masses().iter().sum::<f64>() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unresolvable() {
        let e = sample_excursion(1.0, 64, 4).unwrap();
        let t = excursion_to_tree(&e, 16).unwrap();
        let ps = PointSet { points: vec![(0.5, 1e6)], rate: 1.0 };
        assert!(matches!(glue_continuum(&t, &ps), Err(ExcursionError::UnresolvableIdentification { .. })));
    }
}
