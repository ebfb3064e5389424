use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::compare::{contour_correspondence, dk_upper_bound_in, DkBound, Embedded, FnMetric, LocalTimeTable, Parameterization, PcPath, LOCAL_TIME_GRID};
use crate::excursion::{excursion_to_tree, DiscretizedContinuumTree, Excursion};
use crate::graph::WeightedGraph;
use crate::seed;
use crate::tree::{contour_process, sample_conditioned_gw, Offspring};
use crate::walk::Walker;

/// Checkpoints of the walk kept in each path.
pub const LADDER_CHECKPOINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub n_small: usize,
    pub n_large: usize,
    pub bound: DkBound,
}

/// One level of the ladder, embedded in the fine tree.
struct Level {
    k: usize,
    tree: DiscretizedContinuumTree,
    embedding: Vec<usize>,
    path: PcPath,
    local_times: LocalTimeTable,
}

fn side(l: &Level) -> Embedded<'_> {
    Embedded { embedding: &l.embedding, measure: l.tree.masses(), path: &l.path, local_times: &l.local_times, root: 0 }
}

/// Nearest embedded point for every vertex (multi-source BFS; hop counts are tree distances).
fn nearest(g: &WeightedGraph<f64>, embedding: &[usize]) -> Vec<usize> {
    let mut owner = vec![usize::MAX; g.n_vertices()];
    let mut queue = VecDeque::new();
    for (r, &v) in embedding.iter().enumerate() {
        if owner[v] == usize::MAX {
            owner[v] = r;
            queue.push_back(v);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if owner[y] == usize::MAX {
                owner[y] = owner[x];
                queue.push_back(y);
            }
        }
    }
    owner
}

/// `μ`-weighted mean of the fine local times over each nearest-point cell.
fn cell_averages(values: &[Vec<f64>], mu: &[f64], owner: &[usize], cells: usize) -> Vec<Vec<f64>> {
    let knots = values.first().map_or(0, Vec::len);
    let mut sum = vec![vec![0.0; knots]; cells];
    let mut mass = vec![0.0; cells];
    for (v, &c) in owner.iter().enumerate() {
        mass[c] += mu[v];
        for (s, x) in sum[c].iter_mut().zip(&values[v]) {
            *s += mu[v] * x;
        }
    }
    for (s, m) in sum.iter_mut().zip(&mass) {
        if *m > 0.0 {
            s.iter_mut().for_each(|x| *x /= m);
        }
    }
    sum
}

/// Mass of `[j/K_a, (j+1)/K_a) ∩ [i/K_b, (i+1)/K_b)` for overlapping sample cells.
fn cell_coupling(ka: usize, kb: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let (mut j, mut i) = (0, 0);
    let mut left = 0.0f64;
    while j < ka && i < kb {
        let (ra, rb) = ((j + 1) as f64 / ka as f64, (i + 1) as f64 / kb as f64);
        let right = ra.min(rb);
        if right > left {
            out.push((j, i, right - left));
        }
        left = right;
        if ra <= rb {
            j += 1;
        }
        if rb <= ra {
            i += 1;
        }
    }
    out
}

/// Upper bounds on `d_𝕂` between consecutive levels of a nested ladder of
/// finite trees, all realised inside one fine conditioned tree with `n_fine` edges.
///
/// Level `K` keeps the vertices seen by the contour at `K` equally spaced times,
/// with the branch points between them, each sampled time carrying mass `1/K`.
/// Every level carries the fine walk (run for `n_fine^{3/2} T` steps) projected
/// to its nearest kept vertex and observed at [`LADDER_CHECKPOINTS`] times, and
/// the fine walk's rescaled local times averaged (against `μ`) over the cell of
/// fine vertices nearest to each kept vertex, which is the occupation density
/// of the projected walk. The ambient metric is
/// `n_fine^{−1/2}` times the graph distance, the Prokhorov term is bounded by the
/// coupling of overlapping sample cells, and pairs are matched by contour time.
pub fn dk_ladder(offspring: &Offspring, n_fine: usize, ladder: &[usize], horizon: f64, seed: u64) -> Result<Vec<LadderStep>, HarnessError> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] == 0 {
        return Err(HarnessError::InvalidPlan("ladder must be positive and strictly increasing with two levels".into()));
    }
    if !(horizon > 0.0) {
        return Err(HarnessError::InvalidPlan(format!("horizon must be positive, got {horizon}")));
    }
    let fine = sample_conditioned_gw(offspring, n_fine, seed!(seed; "tree"))?;
    let g = fine.to_graph()?;
    let distances = fine.metric();
    let contour = contour_process(&fine);
    // planting an extra root edge keeps the coded excursion positive inside
    let mut values = vec![0.0];
    values.extend(contour.values.iter().map(|&v| v as f64 + 1.0));
    values.push(0.0);
    let e = Excursion::from_values(1.0, values)?;
    let last = contour.vertices.len() - 1;
    let vertex_at = |grid: usize| contour.vertices[grid.saturating_sub(1).min(last)];

    let alpha = (n_fine as f64).powf(-0.5);
    let beta = (n_fine as f64).powf(1.5);
    let steps = (beta * horizon).ceil() as usize;
    let mut walker = Walker::new(&g, fine.root(), seed!(seed; "walk"))?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(fine.root());
    for _ in 0..steps {
        states.push(walker.step());
    }
    let mu: Vec<f64> = (0..g.n_vertices()).map(|x| g.vertex_weight(x)).collect();
    let all_local = LocalTimeTable::from_walk(&states, &mu, alpha, 1.0 / beta, horizon, LOCAL_TIME_GRID);
    let checkpoints: Vec<usize> = (0..LADDER_CHECKPOINTS).map(|i| states[i * steps / LADDER_CHECKPOINTS]).collect();
    let dt = horizon / LADDER_CHECKPOINTS as f64;

    let levels: Vec<Level> = ladder
        .iter()
        .map(|&k| {
            let tree = excursion_to_tree(&e, k)?;
            let embedding: Vec<usize> = (0..tree.n_representatives()).map(|r| vertex_at(tree.grid_index(r))).collect();
            let owner = nearest(&g, &embedding);
            let path = PcPath::from_steps(&checkpoints.iter().map(|&v| owner[v]).collect::<Vec<_>>(), dt, horizon)?;
            let cells = cell_averages(&all_local.values, &mu, &owner, embedding.len());
            let local_times = LocalTimeTable { knots: all_local.knots.clone(), values: embedding.iter().map(|&v| cells[owner[v]].clone()).collect() };
            Ok(Level { k, tree, embedding, path, local_times })
        })
        .collect::<Result<_, HarnessError>>()?;

    let z = FnMetric { n: g.n_vertices(), d: |i: usize, j: usize| alpha * distances.distance(i, j) as f64 };
    let n_grid = e.n();
    levels
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let c = contour_correspondence(&Parameterization::of_tree(&a.tree), &Parameterization::of_tree(&b.tree), None)?;
            let sample_rep = |l: &Level, j: usize| {
                let grid = ((j as f64 * n_grid as f64 / l.k as f64).round() as usize).min(n_grid - 1);
                l.tree.project(grid as f64 * e.dt())
            };
            let coupling: Vec<(usize, usize, f64)> =
                cell_coupling(a.k, b.k).into_iter().map(|(j, i, m)| (sample_rep(a, j), sample_rep(b, i), m)).collect();
            let bound = dk_upper_bound_in(&z, side(a), side(b), &c, &coupling, true)?;
            Ok(LadderStep { n_small: a.k, n_large: b.k, bound })
        })
        .collect()
}
