use super::{CompareError, FiniteMetric, PcPath};

/// Largest number of jumps per path.
pub const MAX_BREAKPOINTS: usize = 1000;

/// Smallest achievable `max d(x_i, y_j)` over alignments whose time displacement is at most `eta`.
///
/// An alignment is a monotone lattice path over (jumps of `p1` taken, jumps of `p2`
/// taken): a diagonal step matches two jumps, an `x` step places a jump of `p1`
/// strictly between two jumps of `p2`, a `y` step the reverse. Placing jump `a`
/// inside `[b_j, b_{j+1}]` costs its distance to that interval; only `x` and
/// diagonal steps move `p1`'s jumps, so `y` steps are free.
fn bottleneck<M: FiniteMetric + ?Sized>(p1: &PcPath, p2: &PcPath, d: &M, eta: f64) -> f64 {
    let (a, b) = (&p1.jumps, &p2.jumps);
    let (m, k) = (a.len(), b.len());
    let bound = |j: usize| if j == 0 { 0.0 } else if j > k { p2.horizon } else { b[j - 1] };
    let interval_gap = |t: f64, j: usize| {
        let (lo, hi) = (bound(j), bound(j + 1));
        if t < lo {
            lo - t
        } else if t > hi {
            t - hi
        } else {
            0.0
        }
    };
    let mut prev = vec![f64::INFINITY; k + 1];
    let mut cur = vec![f64::INFINITY; k + 1];
    for i in 0..=m {
        for j in 0..=k {
            let mut best = if i == 0 && j == 0 { 0.0 } else { f64::INFINITY };
            if j > 0 {
                best = best.min(cur[j - 1]);
            }
            if i > 0 {
                let t = a[i - 1];
                if interval_gap(t, j) <= eta {
                    best = best.min(prev[j]);
                }
                if j > 0 && (t - b[j - 1]).abs() <= eta {
                    best = best.min(prev[j - 1]);
                }
            }
            cur[j] = if best.is_finite() { best.max(d.dist(p1.values[i], p2.values[j])) } else { best };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[k]
}

/// Skorokhod `J1` distance `inf_λ { sup|λ(t) − t| + sup d(x(λ(t)), y(t)) }` between
/// piecewise-constant paths on one finite metric space.
///
/// The displacement term only takes values among `|a_i − b_j|`, `a_i` and `T − a_i`,
/// and the metric term is nonincreasing in the allowed displacement, so the sum is
/// minimised by divide and conquer over the sorted candidates, skipping ranges on
/// which the metric term is constant.
pub fn skorokhod_j1<M: FiniteMetric + ?Sized>(p1: &PcPath, p2: &PcPath, d: &M) -> Result<f64, CompareError> {
    if p1.horizon != p2.horizon {
        return Err(CompareError::HorizonMismatch(p1.horizon, p2.horizon));
    }
    for p in [p1, p2] {
        if p.jumps.len() > MAX_BREAKPOINTS {
            return Err(CompareError::TooManyBreakpoints(p.jumps.len(), MAX_BREAKPOINTS));
        }
        if p.values.iter().any(|&v| v >= d.size()) {
            return Err(CompareError::PointOutOfRange);
        }
    }
    let mut etas: Vec<f64> = vec![0.0];
    for &a in &p1.jumps {
        etas.push(a);
        etas.push(p1.horizon - a);
        etas.extend(p2.jumps.iter().map(|&b| (a - b).abs()));
    }
    etas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    etas.dedup();
    let f = |i: usize| bottleneck(p1, p2, d, etas[i]);
    let last = etas.len() - 1;
    let (f0, fl) = (f(0), f(last));
    let mut best = (etas[0] + f0).min(etas[last] + fl);
    let mut stack = vec![(0usize, last, f0, fl)];
    while let Some((lo, hi, flo, fhi)) = stack.pop() {
        // on [lo, hi] the metric term lies in [fhi, flo]; nothing beats etas[lo] + fhi
        if flo == fhi || hi - lo <= 1 || etas[lo] + fhi >= best {
            continue;
        }
        let mid = (lo + hi) / 2;
        let fm = f(mid);
        best = best.min(etas[mid] + fm);
        stack.push((lo, mid, flo, fm));
        stack.push((mid, hi, fm, fhi));
    }
    Ok(best)
}

/// `sup_t d(x(t), y(t))`.
pub fn uniform_distance<M: FiniteMetric + ?Sized>(p1: &PcPath, p2: &PcPath, d: &M) -> f64 {
    let mut times: Vec<f64> = std::iter::once(0.0).chain(p1.jumps.iter().cloned()).chain(p2.jumps.iter().cloned()).collect();
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    times.iter().map(|&t| d.dist(p1.value_at(t), p2.value_at(t))).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{MetricKind, MetricMatrix};

    fn metric() -> MetricMatrix<f64> {
        let pts = [0.0f64, 1.0, 3.0, 3.5];
        MetricMatrix::from_fn(MetricKind::ShortestPath, 4, |i, j| (pts[i] - pts[j]).abs())
    }

    #[test]
    fn identical_and_constant() {
        let d = metric();
        let p = PcPath::new(vec![0.2, 0.6], vec![0, 2, 1], 1.0).unwrap();
        assert_eq!(skorokhod_j1(&p, &p, &d).unwrap(), 0.0);
        let (x, y) = (PcPath::constant(0, 1.0), PcPath::constant(2, 1.0));
        assert_eq!(skorokhod_j1(&x, &y, &d).unwrap(), 3.0);
    }

    #[test]
    fn shifted_jump() {
        let d = metric();
        for delta in [0.01, 0.1, 0.3] {
            let p = PcPath::new(vec![0.5], vec![0, 2], 1.0).unwrap();
            let q = PcPath::new(vec![0.5 + delta], vec![0, 2], 1.0).unwrap();
            let v = skorokhod_j1(&p, &q, &d).unwrap();
            assert!((v - delta).abs() < 1e-12, "{delta}: {v}");
            assert!(v <= uniform_distance(&p, &q, &d));
        }
        // a jump shift larger than the value gap is cheaper to leave unmatched
        let p = PcPath::new(vec![0.2], vec![2, 3], 1.0).unwrap();
        let q = PcPath::new(vec![0.8], vec![2, 3], 1.0).unwrap();
        assert!((skorokhod_j1(&p, &q, &d).unwrap() - 0.5).abs() < 1e-12);
    }
}
