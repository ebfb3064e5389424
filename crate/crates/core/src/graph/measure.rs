use serde::Serialize;

use super::WeightedGraph;
use crate::scalar::Real;

/// Vertex weights `μ_x`, total mass `m^G` and stationary law `π^G = μ/m^G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexMeasure<R> {
    pub mu: Vec<R>,
    pub total_mass: R,
    pub pi: Vec<R>,
}

pub fn stationary_measure<R: Real>(g: &WeightedGraph<R>) -> VertexMeasure<R> {
    let mu: Vec<R> = (0..g.n_vertices()).map(|x| g.vertex_weight(x)).collect();
    let total_mass: R = mu.iter().copied().sum();
    let pi = mu.iter().map(|&m| m / total_mass).collect();
    VertexMeasure { mu, total_mass, pi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn k2_measure() {
        let m = stationary_measure(&k2());
        assert_eq!(m.total_mass, 2.0);
        assert_eq!(m.pi, vec![0.5, 0.5]);
    }

    #[test]
    fn triangle_measure() {
        let m = stationary_measure(&triangle());
        assert_eq!(m.total_mass, 6.0);
        for p in &m.pi {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn path_measure_follows_degrees() {
        // degrees (1, 2, 1) over total 4
        let m = stationary_measure(&path(2));
        assert_eq!(m.pi, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn pi_sums_to_one() {
        let g = WeightedGraph::<f64>::from_edges(
            4,
            vec![
                super::super::Edge::new(0, 1, 0.3),
                super::super::Edge::new(1, 2, 1.7),
                super::super::Edge::new(2, 3, 2.9),
                super::super::Edge::new(3, 0, 0.01),
            ],
        )
        .unwrap();
        let m = stationary_measure(&g);
        let s: f64 = m.pi.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(m.total_mass > 0.0);
    }
}
