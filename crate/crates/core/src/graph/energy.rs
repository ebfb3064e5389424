use std::collections::VecDeque;

use super::{GraphError, WeightedGraph};
use crate::scalar::Real;

/// Dirichlet form `E(f, h) = ½ Σ_{x~y} (f(x) − f(y))(h(x) − h(y)) μ_xy`, each edge counted once.
pub fn dirichlet_energy<R: Real>(g: &WeightedGraph<R>, f: &[R], h: &[R]) -> Result<R, GraphError> {
    let n = g.n_vertices();
    for v in [f, h] {
        if v.len() != n {
            return Err(GraphError::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    Ok(g.edges().iter().map(|e| (f[e.u] - f[e.v]) * (h[e.u] - h[e.v]) * e.weight).sum())
}

/// Output of a grounded Laplacian solve for a unit current from `a` to `b`.
#[derive(Debug, Clone)]
pub struct ResistanceSolve<R> {
    pub resistance: R,
    /// Potential with `v(b) = 0` and `v(a) = R(a, b)`.
    pub potential: Vec<R>,
    pub iterations: usize,
    pub residual: R,
}

/// Effective resistance `R_G(a, b)`.
///
/// Trees take a path-sum shortcut; everything else runs Jacobi-preconditioned
/// conjugate gradient on the Laplacian grounded at `b`.
pub fn effective_resistance<R: Real>(g: &WeightedGraph<R>, a: usize, b: usize) -> Result<R, GraphError> {
    if a == b {
        return Err(GraphError::SameEndpoints(a));
    }
    if g.is_tree() {
        return Ok(tree_path_resistance(g, a)[b]);
    }
    resistance_potential(g, a, b).map(|s| s.resistance)
}

/// Resistances from `source` to every vertex of a tree (sum of `1/μ_e` along the unique path).
pub(crate) fn tree_path_resistance<R: Real>(g: &WeightedGraph<R>, source: usize) -> Vec<R> {
    let n = g.n_vertices();
    let mut dist = vec![R::infinity(); n];
    dist[source] = R::zero();
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        for (&y, &w) in g.neighbors(x).iter().zip(g.neighbor_weights(x)) {
            if dist[y].is_infinite() {
                dist[y] = dist[x] + w.recip();
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Solves the grounded Laplacian system `L v = 1_a − 1_b` with `v(b) = 0`.
pub fn resistance_potential<R: Real>(g: &WeightedGraph<R>, a: usize, b: usize) -> Result<ResistanceSolve<R>, GraphError> {
    if a == b {
        return Err(GraphError::SameEndpoints(a));
    }
    let mut rhs = vec![R::zero(); g.n_vertices()];
    rhs[a] = R::one();
    let (potential, iterations, residual) = grounded_solve(g, b, &rhs)?;
    Ok(ResistanceSolve { resistance: potential[a], potential, iterations, residual })
}

/// Jacobi-preconditioned CG for `L v = rhs` on all vertices except `ground` (where `v = 0`).
/// Residual tolerance is [`Real::solver_tolerance`] relative to `‖rhs‖`, at most `10 n` iterations.
pub(crate) fn grounded_solve<R: Real>(
    g: &WeightedGraph<R>,
    ground: usize,
    rhs: &[R],
) -> Result<(Vec<R>, usize, R), GraphError> {
    let n = g.n_vertices();
    let diag: Vec<R> = (0..n)
        .map(|x| {
            g.neighbors(x)
                .iter()
                .zip(g.neighbor_weights(x))
                .filter(|(&y, _)| y != x)
                .map(|(_, &w)| w)
                .sum()
        })
        .collect();
    let apply = |v: &[R], out: &mut [R]| {
        for x in 0..n {
            if x == ground {
                out[x] = R::zero();
                continue;
            }
            let mut acc = R::zero();
            for (&y, &w) in g.neighbors(x).iter().zip(g.neighbor_weights(x)) {
                if y != x {
                    acc += w * (v[x] - v[y]);
                }
            }
            out[x] = acc;
        }
    };
    let dot = |u: &[R], v: &[R]| -> R { u.iter().zip(v).map(|(&p, &q)| p * q).sum() };

    let mut b = rhs.to_vec();
    b[ground] = R::zero();
    let b_norm = dot(&b, &b).sqrt();
    let mut v = vec![R::zero(); n];
    if b_norm == R::zero() {
        return Ok((v, 0, R::zero()));
    }
    let tol = R::solver_tolerance() * b_norm;
    let mut r = b;
    let precond = |r: &[R], z: &mut [R]| {
        for x in 0..n {
            z[x] = if x == ground { R::zero() } else { r[x] / diag[x] };
        }
    };
    let mut z = vec![R::zero(); n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![R::zero(); n];
    let mut rz = dot(&r, &z);
    let max_iter = 10 * n;
    let mut residual = b_norm;
    for it in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        let alpha = rz / pap;
        for x in 0..n {
            v[x] += alpha * p[x];
            r[x] -= alpha * ap[x];
        }
        residual = dot(&r, &r).sqrt();
        if residual <= tol {
            return Ok((v, it + 1, residual));
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for x in 0..n {
            p[x] = z[x] + beta * p[x];
        }
    }
    Err(GraphError::SolverNotConverged { iterations: max_iter, residual: residual.to_f64_lossy() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Edge;

    #[test]
    fn k2_energy_of_indicator() {
        let g = k2();
        let f = [0.0, 1.0];
        assert_eq!(dirichlet_energy(&g, &f, &f).unwrap(), 1.0);
    }

    #[test]
    fn constant_has_zero_energy() {
        let g = triangle();
        let f = [3.5; 3];
        assert_eq!(dirichlet_energy(&g, &f, &f).unwrap(), 0.0);
    }

    #[test]
    fn triangle_energy_sum_of_squares() {
        // edges contribute 1, 1 and 4
        let f = [0.0, 1.0, 2.0];
        assert_eq!(dirichlet_energy(&triangle(), &f, &f).unwrap(), 6.0);
    }

    #[test]
    fn energy_dimension_checked() {
        let err = dirichlet_energy(&triangle(), &[0.0, 1.0], &[0.0, 1.0, 2.0]).unwrap_err();
        assert_eq!(err, GraphError::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn series_law_on_path() {
        for k in 1..8 {
            let g = path(k);
            assert!((effective_resistance(&g, 0, k).unwrap() - k as f64).abs() < 1e-12);
            // CG route agrees with the tree shortcut
            let s = resistance_potential(&g, 0, k).unwrap();
            assert!((s.resistance - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_parallel_law() {
        // 1 ∥ (1 + 1) = 2/3
        let r = effective_resistance(&triangle(), 0, 1).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_parallel_edges_in_multigraph() {
        let g = WeightedGraph::<f64>::multigraph_from_edges(2, vec![Edge::new(0, 1, 2.0), Edge::new(0, 1, 3.0)]).unwrap();
        let r = effective_resistance(&g, 0, 1).unwrap();
        assert!((r - 0.2).abs() < 1e-10);
    }

    #[test]
    fn energy_self_consistency() {
        let g = WeightedGraph::<f64>::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap();
        let s = resistance_potential(&g, 0, 2).unwrap();
        let f: Vec<f64> = s.potential.iter().map(|v| v / s.resistance).collect();
        let e = dirichlet_energy(&g, &f, &f).unwrap();
        assert!((s.resistance * e - 1.0).abs() < 1e-8);
    }

    #[test]
    fn f32_resistance() {
        let g = triangle().cast::<f32>();
        let s = resistance_potential(&g, 0, 1).unwrap();
        assert!((s.resistance - 2.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn same_endpoints_rejected() {
        assert_eq!(effective_resistance(&triangle(), 1, 1).unwrap_err(), GraphError::SameEndpoints(1));
    }
}
