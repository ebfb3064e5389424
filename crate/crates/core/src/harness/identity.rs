use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ks_critical, ks_two_sample, HarnessError};
use crate::excursion::{continuum_blanket_time, excursion_to_tree, theta_scale, Excursion};
use crate::seed;

/// Two-sample comparison of `a^{3/2} τ^e(ε)` with `τ^{Θ_a e}(ε')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub a: f64,
    pub eps_base: f64,
    pub eps_scaled: f64,
    pub ks: f64,
    /// 95% two-sample critical value.
    pub critical: f64,
    pub timeouts_base: usize,
    pub timeouts_scaled: usize,
}

/// Blanket times on the discretized tree of `e` at `eps_base`, multiplied by
/// `a^{3/2}`, against blanket times on the tree of `Θ_a(e)` at `eps_scaled`.
/// The two ensembles use independent walk seeds; timeouts count as `+∞`.
pub fn scaling_identity_ks(
    e: &Excursion,
    a: f64,
    eps_base: f64,
    eps_scaled: f64,
    replicates: usize,
    n_leaves: usize,
    seed: u64,
) -> Result<IdentityCheck, HarnessError> {
    if !(a >= 1.0) {
        return Err(HarnessError::InvalidPlan(format!("scale factor must be at least 1, got {a}")));
    }
    let base = excursion_to_tree(e, n_leaves)?;
    let scaled = excursion_to_tree(&theta_scale(e, a)?, n_leaves)?;
    let factor = a.powf(1.5);
    let t_max = 64.0 * e.zeta().powf(1.5);
    let draw = |tree, eps, scale: f64, tag: &str| -> Result<Vec<f64>, HarnessError> {
        (0..replicates)
            .into_par_iter()
            .map(|i| {
                let r = continuum_blanket_time(tree, eps, t_max * scale, seed!(seed; tag, i))?;
                Ok(r.tau.map_or(f64::INFINITY, |t| t * factor / scale))
            })
            .collect()
    };
    let x = draw(&base, eps_base, 1.0, "base")?;
    let y = draw(&scaled, eps_scaled, factor, "scaled")?;
    let timeouts = |v: &[f64]| v.iter().filter(|t| t.is_infinite()).count();
    Ok(IdentityCheck {
        a,
        eps_base,
        eps_scaled,
        ks: ks_two_sample(&x, &y),
        critical: ks_critical(replicates, replicates, 0.05),
        timeouts_base: timeouts(&x),
        timeouts_scaled: timeouts(&y),
    })
}

/// The identity at its intended fractions: `ε` on `e`, `ε/a` on `Θ_a(e)`.
pub fn blanket_scaling_identity_check(
    e: &Excursion,
    a: f64,
    epsilon: f64,
    replicates: usize,
    n_leaves: usize,
    seed: u64,
) -> Result<IdentityCheck, HarnessError> {
    if !(epsilon / a > 0.0 && epsilon / a < 1.0) {
        return Err(HarnessError::InvalidPlan(format!("epsilon / a must lie in (0, 1), got {}", epsilon / a)));
    }
    scaling_identity_ks(e, a, epsilon, epsilon / a, replicates, n_leaves, seed)
}
