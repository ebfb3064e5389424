use rand::Rng;

use super::{unit_graph, GenError};
use crate::graph::WeightedGraph;
use crate::io::rng_from_seed;

/// `p = 1/n + λ n^{−4/3}`.
pub fn er_critical_probability(n: usize, lambda: f64) -> f64 {
    let n = n as f64;
    1.0 / n + lambda * n.powf(-4.0 / 3.0)
}

/// Erdős–Rényi graph in the critical window.
pub fn sample_er_critical(n: usize, lambda: f64, seed: u64) -> Result<WeightedGraph<f64>, GenError> {
    sample_er(n, er_critical_probability(n, lambda), seed)
}

/// `G(n, p)` by geometric skipping over the `C(n, 2)` vertex pairs in row-major order.
pub fn sample_er(n: usize, p: f64, seed: u64) -> Result<WeightedGraph<f64>, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(GenError::InvalidProbability(p));
    }
    let mut rng = rng_from_seed(seed);
    let log_q = (-p).ln_1p();
    let mut pairs = Vec::new();
    // current pair (i, j) with i < j, advanced by skip lengths
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if !skip.is_finite() || skip > (n * n) as f64 {
            break;
        }
        let mut advance = skip as usize + 1;
        // move `advance` pairs forward from (i, j)
        loop {
            let left = n - 1 - j;
            if advance <= left {
                j += advance;
                break;
            }
            advance -= left;
            i += 1;
            j = i;
            if i >= n - 1 {
                break;
            }
        }
        if i >= n - 1 {
            break;
        }
        pairs.push((i, j));
    }
    unit_graph(n, &pairs, false)
}
