use rand::seq::SliceRandom;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::{unit_graph, GenError};
use crate::graph::WeightedGraph;
use crate::io::rng_from_seed;

/// Prescribed degrees `d_1, …, d_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    /// `ℓ_n = Σ d_i`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whitespace-separated integers.
    pub fn parse(text: &str) -> Result<Self, GenError> {
        text.split_whitespace()
            .map(|t| t.parse().map_err(|_| GenError::InvalidDegreeLaw(format!("bad degree {t:?}"))))
            .collect::<Result<_, _>>()
            .map(DegreeSequence)
    }
}

/// Degree law `P(D = k) = table[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeLaw(pub Vec<f64>);

impl DegreeLaw {
    /// `P(D = 1) = 3/4`, `P(D = 3) = 1/4`: `E[D(D−1)] = E[D] = 3/2`.
    pub fn critical_one_three() -> Self {
        DegreeLaw(vec![0.0, 0.75, 0.0, 0.25])
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn factorial_moment(&self) -> f64 {
        self.0.iter().enumerate().map(|(k, p)| (k * k.saturating_sub(1)) as f64 * p).sum()
    }

    /// Checks `E[D(D−1)]/E[D] = 1 + λ n^{−1/3}` to `1e-9`, `D ≥ 1`, and normalization.
    pub fn validate_critical(&self, lambda: f64, n: usize) -> Result<(), GenError> {
        let total: f64 = self.0.iter().sum();
        if (total - 1.0).abs() > 1e-9 || self.0.iter().any(|&p| !(p >= 0.0)) {
            return Err(GenError::InvalidDegreeLaw("probabilities must be nonnegative and sum to 1".into()));
        }
        if self.0.first().copied().unwrap_or(0.0) > 0.0 {
            return Err(GenError::InvalidDegreeLaw("degree 0 has positive mass".into()));
        }
        let ratio = self.factorial_moment() / self.mean();
        let target = 1.0 + lambda * (n as f64).powf(-1.0 / 3.0);
        if (ratio - target).abs() > 1e-9 {
            return Err(GenError::InvalidDegreeLaw(format!("E[D(D−1)]/E[D] = {ratio}, expected {target}")));
        }
        Ok(())
    }
}

/// `n` i.i.d. degrees; the last one is redrawn until the total is even.
pub fn sample_degree_sequence(law: &DegreeLaw, n: usize, seed: u64) -> Result<DegreeSequence, GenError> {
    let dist = WeightedIndex::new(&law.0).map_err(|e| GenError::InvalidDegreeLaw(e.to_string()))?;
    if n == 0 {
        return Ok(DegreeSequence(Vec::new()));
    }
    if law.0.iter().enumerate().all(|(k, &p)| p == 0.0 || k % 2 == 1) && n % 2 == 1 {
        return Err(GenError::InvalidDegreeLaw("odd-only support with odd n cannot give an even total".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut d: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    while d.iter().sum::<usize>() % 2 == 1 {
        d[n - 1] = dist.sample(&mut rng);
    }
    Ok(DegreeSequence(d))
}

/// Uniform perfect matching of half-edges; loops and multi-edges are kept.
pub fn sample_configuration_model(d: &DegreeSequence, seed: u64) -> Result<WeightedGraph<f64>, GenError> {
    let total = d.total();
    if total % 2 == 1 {
        return Err(GenError::OddDegreeSum(total));
    }
    if d.len() < 2 {
        return Err(GenError::TooSmall(d.len()));
    }
    let mut stubs: Vec<usize> = d.0.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
    stubs.shuffle(&mut rng_from_seed(seed));
    let pairs: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    unit_graph(d.len(), &pairs, true)
}
