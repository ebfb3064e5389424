use serde::{Deserialize, Serialize};

/// Sorted copy with `NaN` rejected by the caller; `+∞` sorts last.
pub(crate) fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
    v
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(x: &[f64]) -> f64 {
    quantile(&sorted(x), 0.5)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`; infinite values count as mass at `+∞`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let cap = |x: &[f64]| sorted(&x.iter().map(|v| v.min(f64::MAX)).collect::<Vec<_>>());
    let (a, b) = (cap(a), cap(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_critical(na: usize, nb: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

/// True when strictly more than half of the flags are set.
pub fn majority(flags: &[bool]) -> bool {
    2 * flags.iter().filter(|&&f| f).count() > flags.len()
}

/// Ordinary least squares `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// Residual standard deviation with `k − 2` degrees of freedom.
    pub resid_sd: f64,
}

/// `None` with fewer than three points or no spread in `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let k = x.len();
    if k < 3 || y.len() != k {
        return None;
    }
    let mx = x.iter().sum::<f64>() / k as f64;
    let my = y.iter().sum::<f64>() / k as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let resid_sd = (sse / (k - 2) as f64).sqrt();
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr: resid_sd / sxx.sqrt(),
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        resid_sd,
    })
}
