use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::{PlaneTree, TreeError};
use crate::io::rng_from_seed;

/// Proposals tried before [`TreeError::RejectionBudgetExceeded`].
pub const REJECTION_BUDGET: usize = 1_000_000;

/// Critical offspring law of a Galton–Watson tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Offspring {
    /// Poisson with mean 1.
    Poisson1,
    /// `P(k) = 2^{−(k+1)}`.
    Geometric,
    /// `P(k) = table[k]`; must sum to 1 with mean 1.
    Table(Vec<f64>),
}

impl Offspring {
    pub fn validate(&self) -> Result<(), TreeError> {
        if let Offspring::Table(p) = self {
            if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(TreeError::InvalidOffspring("negative or non-finite probability".into()));
            }
            let total: f64 = p.iter().sum();
            let mean: f64 = p.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
            if (total - 1.0).abs() > 1e-9 || (mean - 1.0).abs() > 1e-9 {
                return Err(TreeError::InvalidOffspring(format!("total {total}, mean {mean}; both must be 1")));
            }
        }
        Ok(())
    }

    /// Offspring variance `σ²`.
    pub fn variance(&self) -> f64 {
        match self {
            Offspring::Poisson1 => 1.0,
            Offspring::Geometric => 2.0,
            Offspring::Table(p) => p.iter().enumerate().map(|(k, v)| (k as f64 - 1.0).powi(2) * v).sum(),
        }
    }

    /// Whether `n + 1` i.i.d. draws can sum to `n` (lattice and range check).
    fn can_reach(&self, n: usize) -> bool {
        match self {
            Offspring::Poisson1 | Offspring::Geometric => true,
            Offspring::Table(p) => {
                let support: Vec<usize> = (0..p.len()).filter(|&k| p[k] > 0.0).collect();
                if support.first() != Some(&0) {
                    return false;
                }
                let span = support.iter().fold(0usize, |g, &k| gcd(g, k));
                n == 0 || (span > 0 && n % span == 0)
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Empirical children distribution: `s[i]` vertices with `i` children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ecd(pub Vec<usize>);

impl Ecd {
    pub fn of(t: &PlaneTree) -> Self {
        let mut s = Vec::new();
        for v in 0..t.n_vertices() {
            let c = t.children(v).len();
            if s.len() <= c {
                s.resize(c + 1, 0);
            }
            s[c] += 1;
        }
        Ecd(s)
    }

    pub fn n_vertices(&self) -> usize {
        self.0.iter().sum()
    }

    /// `Σ s_i = 1 + Σ i s_i` and `s_0 ≥ 1`.
    pub fn is_tenable(&self) -> bool {
        let total = self.n_vertices();
        let edges: usize = self.0.iter().enumerate().map(|(i, s)| i * s).sum();
        self.0.first().copied().unwrap_or(0) >= 1 && total == edges + 1
    }

    /// Child-count multiset in increasing order.
    pub fn multiset(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect()
    }
}

/// Rotation offset that turns a child-count sequence with sum `len − 1` into a valid
/// preorder word (cycle lemma: exactly one of the `len` rotations works).
pub fn cycle_lemma_rotation(seq: &[usize]) -> usize {
    let mut s: i64 = 0;
    let mut best = i64::MAX;
    let mut arg = 0;
    for (k, &c) in seq.iter().enumerate() {
        s += c as i64 - 1;
        if s < best {
            best = s;
            arg = k + 1;
        }
    }
    arg % seq.len()
}

fn tree_from_cyclic(mut seq: Vec<usize>) -> PlaneTree {
    let r = cycle_lemma_rotation(&seq);
    seq.rotate_left(r);
    PlaneTree::from_child_sequence(&seq).expect("cycle lemma rotation is a valid word")
}

/// Galton–Watson tree conditioned to have exactly `n` edges (`n + 1` vertices).
///
/// The child-count vector of `n + 1` i.i.d. offspring conditioned on summing to `n` is
/// exchangeable, so one cycle-lemma rotation gives the conditioned tree. For Poisson(1)
/// the conditioned vector is multinomial, for the geometric law it is a uniform
/// composition; other tables use rejection.
pub fn sample_conditioned_gw(offspring: &Offspring, n: usize, seed: u64) -> Result<PlaneTree, TreeError> {
    offspring.validate()?;
    if n == 0 {
        return Ok(PlaneTree::single_vertex());
    }
    if !offspring.can_reach(n) {
        return Err(TreeError::InfeasibleSize(n));
    }
    let mut rng = rng_from_seed(seed);
    let slots = n + 1;
    let seq = match offspring {
        Offspring::Poisson1 => {
            let mut c = vec![0usize; slots];
            for _ in 0..n {
                c[rng.random_range(0..slots)] += 1;
            }
            c
        }
        Offspring::Geometric => {
            // n balls and `slots − 1` bars among `n + slots − 1` positions
            let mut bars: Vec<usize> = sample_indices(&mut rng, n + slots - 1, slots - 1).into_vec();
            bars.sort_unstable();
            let mut c = Vec::with_capacity(slots);
            let mut prev = 0;
            for &b in &bars {
                c.push(b - prev);
                prev = b + 1;
            }
            c.push(n + slots - 1 - prev);
            c
        }
        Offspring::Table(p) => {
            let dist = WeightedIndex::new(p).map_err(|e| TreeError::InvalidOffspring(e.to_string()))?;
            let mut c = vec![0usize; slots];
            let mut accepted = false;
            'outer: for _ in 0..REJECTION_BUDGET {
                let mut total = 0;
                for slot in c.iter_mut() {
                    *slot = dist.sample(&mut rng);
                    total += *slot;
                    if total > n {
                        continue 'outer;
                    }
                }
                if total == n {
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(TreeError::RejectionBudgetExceeded(REJECTION_BUDGET));
            }
            c
        }
    };
    Ok(tree_from_cyclic(seq))
}

/// Uniform plane tree with a given empirical children distribution.
pub fn uniform_plane_tree_with_ecd(s: &Ecd, seed: u64) -> Result<PlaneTree, TreeError> {
    if !s.is_tenable() {
        return Err(TreeError::NotTenable(format!("{:?}", s.0)));
    }
    let mut seq = s.multiset();
    seq.shuffle(&mut rng_from_seed(seed));
    Ok(tree_from_cyclic(seq))
}
