use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ExcursionError;
use crate::io::rng_from_seed;
use crate::seed;

const MAX_EXTENSIONS: usize = 8;
const TAIL_FRACTION: f64 = 0.1;
const TAIL_MASS: f64 = 1e-3;

/// Excursions of the reflected process, longest first, with their marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicExcursions {
    pub lengths: Vec<f64>,
    pub areas: Vec<f64>,
    pub marks: Vec<usize>,
    pub horizon: f64,
}

impl ParabolicExcursions {
    pub fn sum_sq(&self) -> f64 {
        self.lengths.iter().map(|l| l * l).sum()
    }

    pub fn longest(&self) -> f64 {
        self.lengths.first().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Closed {
    start: f64,
    length: f64,
    area: f64,
}

/// Euler scheme for `B^{c,λ}_t = (√c₂/c₁) B_t + λt − c₂t²/(2c₁³)` reflected at its
/// running minimum. The horizon doubles (up to 8 times) until the excursions
/// starting in its last tenth carry under 0.1% of the total squared length.
/// Each excursion receives `Poisson(c₃ · area)` marks.
pub fn simulate_reflected_parabolic(
    lambda: f64,
    c: (f64, f64, f64),
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<ParabolicExcursions, ExcursionError> {
    let (c1, c2, c3) = c;
    for (name, v) in [("c1", c1), ("c2", c2), ("c3", c3), ("horizon", horizon)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ExcursionError::InvalidParameter { name, value: v });
        }
    }
    if !(dt > 0.0 && dt <= 1e-3 * horizon) {
        return Err(ExcursionError::InvalidParameter { name: "dt", value: dt });
    }
    let sigma = c2.sqrt() / c1 * dt.sqrt();
    let curvature = c2 / (2.0 * c1.powi(3));
    let mut rng = rng_from_seed(seed);

    let mut closed: Vec<Closed> = Vec::new();
    let (mut x, mut low, mut t) = (0.0f64, 0.0f64, 0.0f64);
    let mut step = 0u64;
    let (mut open_start, mut open_area) = (0.0, 0.0);
    let mut target = horizon;
    for _ in 0..=MAX_EXTENSIONS {
        while t < target {
            let z: f64 = rng.sample(StandardNormal);
            step += 1;
            let t_next = step as f64 * dt;
            x += sigma * z + lambda * dt - curvature * (t_next * t_next - t * t);
            t = t_next;
            if x <= low {
                low = x;
                if open_area > 0.0 {
                    closed.push(Closed { start: open_start, length: t - open_start, area: open_area });
                }
                open_start = t;
                open_area = 0.0;
            } else {
                open_area += (x - low) * dt;
            }
        }
        let total: f64 = closed.iter().map(|e| e.length * e.length).sum();
        let tail: f64 = closed
            .iter()
            .filter(|e| e.start >= (1.0 - TAIL_FRACTION) * target)
            .map(|e| e.length * e.length)
            .sum();
        let open = (t - open_start).powi(2);
        if total > 0.0 && tail + open <= TAIL_MASS * total {
            let mut marks_rng = rng_from_seed(seed!(seed; "marks"));
            closed.sort_by(|a, b| b.length.partial_cmp(&a.length).unwrap());
            let marks = closed
                .iter()
                .map(|e| {
                    let m = c3 * e.area;
                    Poisson::new(m).map(|p| p.sample(&mut marks_rng) as usize).unwrap_or(0)
                })
                .collect();
            return Ok(ParabolicExcursions {
                lengths: closed.iter().map(|e| e.length).collect(),
                areas: closed.iter().map(|e| e.area).collect(),
                marks,
                horizon: target,
            });
        }
        target *= 2.0;
    }
    Err(ExcursionError::HorizonTooShort { horizon })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_marked() {
        let r = simulate_reflected_parabolic(0.0, (1.0, 1.0, 1.0), 10.0, 1e-3, 1).unwrap();
        assert!(r.lengths.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(r.lengths.len(), r.marks.len());
        assert!(r.sum_sq().is_finite() && r.sum_sq() > 0.0);
    }

    #[test]
    fn sum_sq_stable_in_horizon() {
        let a = simulate_reflected_parabolic(0.0, (1.0, 1.0, 1.0), 10.0, 1e-3, 7).unwrap();
        let b = simulate_reflected_parabolic(0.0, (1.0, 1.0, 1.0), 20.0, 1e-3, 7).unwrap();
        assert!((a.sum_sq() - b.sum_sq()).abs() <= 2e-3 * a.sum_sq().max(b.sum_sq()));
    }

    #[test]
    fn rejects_coarse_step() {
        assert!(simulate_reflected_parabolic(0.0, (1.0, 1.0, 1.0), 1.0, 0.01, 1).is_err());
    }
}
