use super::{WalkError, WalkPath};
use crate::graph::{MetricMatrix, WeightedGraph};
use crate::scalar::Real;

/// Kernel-smoothed local time at `x`:
/// `Σ_{s<t} f(X_s) / Σ_y f(y) μ_y` with `f(y) = max(0, δ − d(x, y))`.
///
/// The kernel is evaluated as `max(0, 1 − d/δ)`, which leaves the ratio
/// unchanged and makes the point-mass case return `count(x)/μ_x` exactly.
pub fn smoothed_occupation<R: Real>(
    g: &WeightedGraph<R>,
    path: &WalkPath,
    x: usize,
    delta: R,
    t: usize,
    metric: &MetricMatrix<R>,
) -> Result<R, WalkError> {
    if !(delta > R::zero()) {
        return Err(WalkError::InvalidDelta(delta.to_f64_lossy()));
    }
    if t > path.steps.len() {
        return Err(WalkError::PathTooShort { t, len: path.steps.len() });
    }
    let n = g.n_vertices();
    let kernel: Vec<R> = (0..n).map(|y| (R::one() - metric.get(x, y) / delta).max(R::zero())).collect();
    let mut visits = vec![0u64; n];
    for &y in &path.steps[..t] {
        visits[y] += 1;
    }
    let mut num = R::zero();
    let mut den = R::zero();
    for y in 0..n {
        if kernel[y] > R::zero() {
            num += kernel[y] * R::lit(visits[y] as f64);
            den += kernel[y] * g.vertex_weight(y);
        }
    }
    if den == R::zero() {
        return Err(WalkError::EmptyKernel { x, delta: delta.to_f64_lossy() });
    }
    Ok(num / den)
}
