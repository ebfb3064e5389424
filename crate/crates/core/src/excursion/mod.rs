//! Grid excursions, the real trees they code, Poisson gluing and the
//! reflected parabolic-drift Brownian motion.

mod glue;
mod parabolic;
mod tree;
mod walk;

use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{rng_from_seed, LabRng};
use crate::seed;

pub use glue::{glue_continuum, sample_pointset, GluedSpace, PointSet};
pub use parabolic::{simulate_reflected_parabolic, ParabolicExcursions};
pub use tree::{excursion_to_tree, DiscretizedContinuumTree};
pub use walk::{continuum_blanket_samples, continuum_blanket_time, ContinuumBlanket};

const MIN_ESS: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExcursionError {
    #[error("invalid excursion: {0}")]
    Invalid(String),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("{n_leaves} sampled times requested but the grid has only {n} cells")]
    ResolutionTooCoarse { n_leaves: usize, n: usize },
    #[error("point (t = {t}, x = {x}) does not lie under the excursion")]
    UnresolvableIdentification { t: f64, x: f64 },
    #[error("horizon {horizon} too short: the reflected process has not settled")]
    HorizonTooShort { horizon: f64 },
    #[error("importance weights degenerate (effective sample size {ess:.2} < 10)")]
    DegenerateWeights { ess: f64 },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// A nonnegative excursion on a uniform grid of `N + 1` points over `[0, ζ]`.
///
/// Stored as a base shape together with the accumulated `Θ` factor, so that
/// `Θ_a ∘ Θ_b = Θ_{ab}` holds exactly: values are `√factor · base`, length is
/// `factor · base_zeta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    base: Vec<f64>,
    base_zeta: f64,
    factor: f64,
}

impl Excursion {
    /// Validates and wraps grid values. Small negative values are clipped to 0;
    /// interior zeros are rejected.
    pub fn from_values(zeta: f64, values: Vec<f64>) -> Result<Self, ExcursionError> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(ExcursionError::InvalidParameter { name: "zeta", value: zeta });
        }
        if values.len() < 3 {
            return Err(ExcursionError::Invalid(format!("need at least 3 grid points, got {}", values.len())));
        }
        let mut values = values;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ExcursionError::Invalid("non-finite value".into()));
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        let n = values.len() - 1;
        if values[0] != 0.0 || values[n] != 0.0 {
            return Err(ExcursionError::Invalid("endpoints must be 0".into()));
        }
        if let Some(i) = (1..n).find(|&i| values[i] <= 0.0) {
            return Err(ExcursionError::Invalid(format!("interior zero at grid index {i}")));
        }
        Ok(Self { base: values, base_zeta: zeta, factor: 1.0 })
    }

    /// Grid resolution `N` (number of cells).
    pub fn n(&self) -> usize {
        self.base.len() - 1
    }

    pub fn zeta(&self) -> f64 {
        self.factor * self.base_zeta
    }

    pub fn dt(&self) -> f64 {
        self.zeta() / self.n() as f64
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.factor.sqrt() * self.base[i]
    }

    pub fn values(&self) -> Vec<f64> {
        let s = self.factor.sqrt();
        self.base.iter().map(|&v| s * v).collect()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.zeta() * i as f64 / self.n() as f64
    }

    /// Linear interpolation at time `t ∈ [0, ζ]`.
    pub fn at(&self, t: f64) -> f64 {
        let n = self.n();
        let s = (t / self.zeta() * n as f64).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let f = s - i as f64;
        self.value(i) * (1.0 - f) + self.value(i + 1) * f
    }

    pub fn max(&self) -> f64 {
        self.factor.sqrt() * self.base.iter().cloned().fold(0.0, f64::max)
    }

    /// Trapezoidal `∫₀^ζ e`, exact for the piecewise-linear interpolation.
    pub fn integral(&self) -> f64 {
        let s: f64 = self.base.iter().sum();
        self.factor.powf(1.5) * s * self.base_zeta / self.n() as f64
    }

    /// Composite Simpson `∫₀^ζ e` (trapezoid on the last cell when `N` is odd).
    pub fn integral_simpson(&self) -> f64 {
        let n = self.n();
        let h = self.dt();
        let v = self.values();
        let even = n - n % 2;
        let mut s = 0.0;
        for i in (0..even).step_by(2) {
            s += v[i] + 4.0 * v[i + 1] + v[i + 2];
        }
        let mut total = s * h / 3.0;
        if even < n {
            total += 0.5 * h * (v[n - 1] + v[n]);
        }
        total
    }

    /// Grid dump: a `# zeta=…,n=…` header line then one value per line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# zeta={},n={}\nvalue\n", self.zeta(), self.n());
        for v in self.values() {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ExcursionError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ExcursionError::Invalid("empty input".into()))?;
        let zeta = header
            .trim_start_matches('#')
            .split(',')
            .find_map(|kv| kv.trim().strip_prefix("zeta=").map(str::to_owned))
            .and_then(|z| z.parse::<f64>().ok())
            .ok_or_else(|| ExcursionError::Invalid("missing zeta in header".into()))?;
        let values = lines
            .filter(|l| !l.trim().is_empty() && l.trim() != "value")
            .map(|l| l.trim().parse::<f64>().map_err(|e| ExcursionError::Invalid(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_values(zeta, values)
    }
}

/// `Θ_a(e)(t) = √a · e(t / a)`, a length-`aζ` excursion on the same number of cells.
pub fn theta_scale(e: &Excursion, a: f64) -> Result<Excursion, ExcursionError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(ExcursionError::InvalidParameter { name: "a", value: a });
    }
    Ok(Excursion { base: e.base.clone(), base_zeta: e.base_zeta, factor: e.factor * a })
}

fn unit_excursion_shape(n: usize, rng: &mut LabRng) -> Vec<f64> {
    let sd = (1.0 / n as f64).sqrt();
    loop {
        let mut walk = Vec::with_capacity(n + 1);
        walk.push(0.0);
        let mut s = 0.0;
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            s += sd * z;
            walk.push(s);
        }
        let end = walk[n];
        for (k, w) in walk.iter_mut().enumerate() {
            *w -= end * k as f64 / n as f64;
        }
        let (m, &low) = walk[..n]
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let mut out: Vec<f64> = (0..=n).map(|k| walk[(m + k) % n] - low).collect();
        out[0] = 0.0;
        out[n] = 0.0;
        // ties at the minimum have probability zero but would leave interior zeros
        if out[1..n].iter().all(|&v| v > 0.0) {
            return out;
        }
    }
}

fn check_grid(zeta: f64, n: usize) -> Result<(), ExcursionError> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(ExcursionError::InvalidParameter { name: "zeta", value: zeta });
    }
    if n < 2 {
        return Err(ExcursionError::InvalidParameter { name: "n", value: n as f64 });
    }
    Ok(())
}

/// Brownian excursion of length `zeta` on `n` cells: a Gaussian random-walk
/// bridge rotated at its minimum (Vervaat), then `Θ_zeta`-scaled.
pub fn sample_excursion(zeta: f64, n: usize, seed: u64) -> Result<Excursion, ExcursionError> {
    check_grid(zeta, n)?;
    let mut rng = rng_from_seed(seed);
    let base = unit_excursion_shape(n, &mut rng);
    Ok(Excursion { base, base_zeta: 1.0, factor: zeta })
}

/// Excursion of length `zeta` with law tilted by `exp(∫e)`, by resampling one of
/// `pool_size` Brownian excursions. Returns the draw and the effective sample size.
pub fn sample_tilted_excursion(zeta: f64, n: usize, seed: u64, pool_size: usize) -> Result<(Excursion, f64), ExcursionError> {
    check_grid(zeta, n)?;
    if pool_size == 0 {
        return Err(ExcursionError::InvalidParameter { name: "pool_size", value: 0.0 });
    }
    let member = |i: usize| sample_excursion(zeta, n, seed!(seed; "tilted-pool", i));
    let areas = (0..pool_size).map(|i| member(i).map(|e| e.integral())).collect::<Result<Vec<_>, _>>()?;
    let top = areas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = areas.iter().map(|a| (a - top).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let ess = sum * sum / sum_sq;
    if ess < MIN_ESS.min(pool_size as f64) {
        return Err(ExcursionError::DegenerateWeights { ess });
    }
    let mut rng = rng_from_seed(seed!(seed; "tilted-pick"));
    let pick = WeightedIndex::new(&weights).expect("positive weights").sample(&mut rng);
    Ok((member(pick)?, ess))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_positivity() {
        for s in 0..20 {
            let e = sample_excursion(1.0, 64, s).unwrap();
            assert_eq!(e.value(0), 0.0);
            assert_eq!(e.value(64), 0.0);
            assert!((1..64).all(|i| e.value(i) > 0.0));
        }
    }

    #[test]
    fn theta_length_and_group_action() {
        let e = sample_excursion(1.5, 128, 3).unwrap();
        let a = 2.7;
        assert_eq!(theta_scale(&e, a).unwrap().zeta(), a * e.zeta());
        assert_eq!(theta_scale(&e, 1.0).unwrap(), e);
        let back = theta_scale(&theta_scale(&e, a).unwrap(), 1.0 / a).unwrap();
        for i in 0..=128 {
            assert!((back.value(i) - e.value(i)).abs() < 1e-12);
        }
        assert!((back.zeta() - e.zeta()).abs() < 1e-12);
        let ab = theta_scale(&theta_scale(&e, 2.0).unwrap(), 3.0).unwrap();
        assert_eq!(ab, theta_scale(&e, 6.0).unwrap());
    }

    #[test]
    fn theta_values() {
        let e = sample_excursion(1.0, 32, 9).unwrap();
        let s = theta_scale(&e, 4.0).unwrap();
        for i in 0..=32 {
            assert!((s.value(i) - 2.0 * e.value(i)).abs() < 1e-12);
            assert!((s.time(i) - 4.0 * e.time(i)).abs() < 1e-12);
        }
        assert!((s.integral() - 8.0 * e.integral()).abs() < 1e-12);
    }

    #[test]
    fn rejects_interior_zero() {
        assert!(Excursion::from_values(1.0, vec![0.0, 1.0, 0.0, 1.0, 0.0]).is_err());
        assert!(Excursion::from_values(1.0, vec![0.0, 1.0, -1e-300, 1.0, 0.0]).is_err());
        assert!(Excursion::from_values(1.0, vec![-0.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let e = sample_excursion(2.0, 16, 1).unwrap();
        let back = Excursion::from_csv(&e.to_csv()).unwrap();
        assert_eq!(back.n(), 16);
        assert_eq!(back.zeta(), 2.0);
        for i in 0..=16 {
            assert_eq!(back.value(i), e.value(i));
        }
    }

    #[test]
    fn quadratures_agree() {
        let e = sample_excursion(1.0, 1 << 12, 5).unwrap();
        let (a, b) = (e.integral(), e.integral_simpson());
        assert!(((a - b) / a).abs() < 1e-3, "{a} {b}");
    }

    #[test]
    fn deterministic() {
        assert_eq!(sample_excursion(1.0, 64, 4).unwrap(), sample_excursion(1.0, 64, 4).unwrap());
        let (a, _) = sample_tilted_excursion(1.0, 32, 4, 50).unwrap();
        let (b, _) = sample_tilted_excursion(1.0, 32, 4, 50).unwrap();
        assert_eq!(a, b);
    }
}
