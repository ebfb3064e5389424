use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;

use super::admissible::{admissible_pairs, count_admissible_tuples, sample_admissible_tuple, GluePlan, MAX_GLUE_SURPLUS};
use super::config::DegreeSequence;
use super::{unit_graph, GenError};
use crate::graph::WeightedGraph;
use crate::io::rng_from_seed;
use crate::tree::{uniform_plane_tree_with_ecd, Ecd, PlaneTree};

#[derive(Debug, Clone)]
pub struct PrescribedSample {
    pub graph: WeightedGraph<f64>,
    pub surplus: usize,
    /// Effective sample size of the tree pool (the pool size when `k = 0`).
    pub ess: f64,
}

/// Edges of `L(θ, z)`: the tree minus the glued leaves, plus `par(x_i)–par(y_i)` per pair.
pub fn glue_tree(t: &PlaneTree, plan: &GluePlan) -> Vec<(usize, usize)> {
    let removed: HashSet<usize> = plan.pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
    let mut edges: Vec<(usize, usize)> = t.edges().into_iter().filter(|(_, c)| !removed.contains(c)).collect();
    for &(x, y) in &plan.pairs {
        edges.push((t.parent(x).unwrap(), t.parent(y).unwrap()));
    }
    edges
}

/// Uniform connected graph with degree sequence `d̃` (with `d̃_1 = 1`), surplus
/// `k = (Σ d̃ − 2(m̃ − 1))/2`.
///
/// A plane tree with children sequence `(d̃_i − 1)_{i ≥ 2}` plus `2k` extra leaves is drawn with
/// probability proportional to its number of admissible `k`-tuples (importance resampling
/// over `pool_size` uniform trees), a tuple is drawn uniformly and glued, the remaining vertices
/// are labelled uniformly within each child-count class, and vertex 1 is attached to the root.
/// Vertex `j` of the output is label `j + 1`.
pub fn sample_prescribed_connected(d_tilde: &DegreeSequence, seed: u64, pool_size: usize) -> Result<PrescribedSample, GenError> {
    let d = &d_tilde.0;
    let m_tilde = d.len();
    if m_tilde < 2 {
        return Err(GenError::TooSmall(m_tilde));
    }
    if d[0] != 1 || d.iter().any(|&x| x == 0) {
        return Err(GenError::InfeasibleSurplus("need d̃_1 = 1 and every degree ≥ 1".into()));
    }
    let total = d_tilde.total();
    let base = 2 * (m_tilde - 1);
    if total < base || (total - base) % 2 == 1 {
        return Err(GenError::InfeasibleSurplus(format!("degree sum {total} is not 2(m̃−1) + 2k")));
    }
    let k = (total - base) / 2;
    if k > MAX_GLUE_SURPLUS {
        return Err(GenError::SurplusTooLarge(k, MAX_GLUE_SURPLUS));
    }
    let mut children: Vec<usize> = d[1..].iter().map(|&x| x - 1).collect();
    children.extend(std::iter::repeat_n(0, 2 * k));
    let mut s = vec![0usize; children.iter().max().unwrap() + 1];
    for &c in &children {
        s[c] += 1;
    }
    let ecd = Ecd(s);
    if !ecd.is_tenable() {
        return Err(GenError::InfeasibleSurplus(format!("children sequence {children:?} is not tenable")));
    }
    let mut rng = rng_from_seed(seed);
    let draw_tree = |rng: &mut _| -> Result<PlaneTree, GenError> {
        let tree_seed: u64 = rand::Rng::random(rng);
        Ok(uniform_plane_tree_with_ecd(&ecd, tree_seed)?)
    };

    let (tree, ess) = if k == 0 {
        (draw_tree(&mut rng)?, pool_size.max(1) as f64)
    } else {
        let mut pool = Vec::with_capacity(pool_size);
        let mut weights = Vec::with_capacity(pool_size);
        for _ in 0..pool_size.max(1) {
            let t = draw_tree(&mut rng)?;
            let w = count_admissible_tuples(&admissible_pairs(&t), k)? as f64;
            pool.push(t);
            weights.push(w);
        }
        let sum: f64 = weights.iter().sum();
        if sum == 0.0 {
            return Err(GenError::NoAdmissibleTuples(k));
        }
        let ess = sum * sum / weights.iter().map(|w| w * w).sum::<f64>();
        let pick = WeightedIndex::new(&weights).expect("nonzero weights").sample(&mut rng);
        (pool.swap_remove(pick), ess)
    };
    let pairs = admissible_pairs(&tree);
    let plan = sample_admissible_tuple(&tree, &pairs, k, &mut rng)?.ok_or(GenError::NoAdmissibleTuples(k))?;

    // labels: vertex with c children gets a uniform label j ≥ 2 with d̃_j − 1 = c
    let glued: HashSet<usize> = plan.pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
    let max_c = ecd.0.len();
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); max_c];
    for (j, &dj) in d.iter().enumerate().skip(1) {
        pools[dj - 1].push(j);
    }
    for p in &mut pools {
        p.shuffle(&mut rng);
    }
    let mut label = vec![usize::MAX; tree.n_vertices()];
    for v in tree.preorder() {
        if glued.contains(&v) {
            continue;
        }
        label[v] = pools[tree.children(v).len()].pop().expect("class sizes match the ECD");
    }
    let mut edges: Vec<(usize, usize)> = glue_tree(&tree, &plan).into_iter().map(|(a, b)| (label[a], label[b])).collect();
    edges.push((0, label[tree.root()]));
    let mut seen = HashSet::new();
    let multigraph = !edges.iter().all(|&(a, b)| seen.insert((a.min(b), a.max(b))));
    let graph = unit_graph(m_tilde, &edges, multigraph)?;
    Ok(PrescribedSample { graph, surplus: k, ess })
}
