use std::collections::{HashMap, HashSet};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::Serialize;

use super::GenError;
use crate::tree::PlaneTree;

/// Largest surplus for which admissible tuples are counted.
pub const MAX_GLUE_SURPLUS: usize = 4;

/// Surplus edges to glue into a plane tree: `k` admissible leaf pairs on `2k` distinct
/// leaves, listed in increasing depth-first order of `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluePlan {
    pub pairs: Vec<(usize, usize)>,
    pub k: usize,
}

struct Order {
    dfn: Vec<usize>,
    end: Vec<usize>,
}

fn order(t: &PlaneTree) -> Order {
    let n = t.n_vertices();
    let pre = t.preorder();
    let mut dfn = vec![0; n];
    for (i, &v) in pre.iter().enumerate() {
        dfn[v] = i;
    }
    let mut size = vec![1usize; n];
    for &v in pre.iter().rev() {
        if let Some(p) = t.parent(v) {
            size[p] += size[v];
        }
    }
    let end = (0..n).map(|v| dfn[v] + size[v] - 1).collect();
    Order { dfn, end }
}

/// Ordered leaf pairs `(x, y)` with `par(x)` explored strictly before `par(y)` and
/// `gpar(y)` on the ancestral line from the root to `gpar(x)`. A leaf at depth one has
/// no grandparent and takes part in no pair.
pub fn admissible_pairs(t: &PlaneTree) -> Vec<(usize, usize)> {
    let o = order(t);
    let gpar = |v: usize| t.parent(v).and_then(|p| t.parent(p));
    let mut leaves: Vec<usize> = (0..t.n_vertices()).filter(|&v| t.is_leaf(v) && gpar(v).is_some()).collect();
    leaves.sort_by_key(|&v| o.dfn[v]);
    let mut out = Vec::new();
    for &x in &leaves {
        let (px, gx) = (t.parent(x).unwrap(), gpar(x).unwrap());
        for &y in &leaves {
            let (py, gy) = (t.parent(y).unwrap(), gpar(y).unwrap());
            let before = o.dfn[px] < o.dfn[py];
            let on_line = o.dfn[gy] <= o.dfn[gx] && o.dfn[gx] <= o.end[gy];
            if before && on_line {
                out.push((x, y));
            }
        }
    }
    out
}

/// `|A_k|`: number of `k`-sets of admissible pairs using `2k` distinct leaves.
pub fn count_admissible_tuples(pairs: &[(usize, usize)], k: usize) -> Result<u64, GenError> {
    match k {
        0 => Ok(1),
        1 => Ok(pairs.len() as u64),
        2 => {
            // unordered pairs of pairs minus those sharing a leaf; two distinct pairs share at most one
            let mut deg: HashMap<usize, u64> = HashMap::new();
            for &(x, y) in pairs {
                *deg.entry(x).or_default() += 1;
                *deg.entry(y).or_default() += 1;
            }
            let p = pairs.len() as u64;
            let shared: u64 = deg.values().map(|d| d * (d - 1) / 2).sum();
            Ok(p * p.saturating_sub(1) / 2 - shared)
        }
        k if k <= MAX_GLUE_SURPLUS => {
            Ok(enumerate(pairs, k, 0, &mut HashSet::new()))
        }
        k => Err(GenError::SurplusTooLarge(k, MAX_GLUE_SURPLUS)),
    }
}

fn enumerate(pairs: &[(usize, usize)], k: usize, from: usize, used: &mut HashSet<usize>) -> u64 {
    if k == 0 {
        return 1;
    }
    let mut total = 0;
    for i in from..pairs.len() {
        let (x, y) = pairs[i];
        if used.contains(&x) || used.contains(&y) {
            continue;
        }
        used.insert(x);
        used.insert(y);
        total += enumerate(pairs, k - 1, i + 1, used);
        used.remove(&x);
        used.remove(&y);
    }
    total
}

/// Uniform element of `A_k` given the admissible pairs, or `None` if it is empty.
pub fn sample_admissible_tuple<G: Rng + ?Sized>(
    t: &PlaneTree,
    pairs: &[(usize, usize)],
    k: usize,
    rng: &mut G,
) -> Result<Option<GluePlan>, GenError> {
    if k > MAX_GLUE_SURPLUS {
        return Err(GenError::SurplusTooLarge(k, MAX_GLUE_SURPLUS));
    }
    if k == 0 {
        return Ok(Some(GluePlan { pairs: Vec::new(), k }));
    }
    if pairs.len() < k || count_admissible_tuples(pairs, k)? == 0 {
        return Ok(None);
    }
    // a uniform k-subset conditioned on distinct leaves is uniform on A_k
    loop {
        let idx = sample_indices(rng, pairs.len(), k).into_vec();
        let mut leaves: Vec<usize> = idx.iter().flat_map(|&i| [pairs[i].0, pairs[i].1]).collect();
        leaves.sort_unstable();
        leaves.dedup();
        if leaves.len() == 2 * k {
            let o = order(t);
            let mut chosen: Vec<(usize, usize)> = idx.into_iter().map(|i| pairs[i]).collect();
            chosen.sort_by_key(|&(x, y)| (o.dfn[x], o.dfn[y]));
            return Ok(Some(GluePlan { pairs: chosen, k }));
        }
    }
}
