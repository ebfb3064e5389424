//! Brute-force oracles shared by the oracle tests and the acceptance run.
//! Each `check_*` returns a one-line detail, `Err` when the check fails.

use std::collections::HashMap;

use blanket_lab::compare::{prokhorov_distance, skorokhod_j1, uniform_distance, PcPath};
use blanket_lab::excursion::{excursion_to_tree, sample_excursion, DiscretizedContinuumTree, GluedSpace};
use blanket_lab::gen::{sample_configuration_model, sample_prescribed_connected, sample_tilted_tree, DegreeSequence};
use blanket_lab::graph::{Edge, MetricKind, MetricMatrix, WeightedGraph};
use blanket_lab::seed;
use blanket_lab::tree::{depth_first_walk_and_area, PlaneTree};
use blanket_lab::walk::blanket_time_variable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{all_simple_graphs, chi2_critical, chi2_statistic, edge_key, is_connected};

pub type Check = Result<String, String>;

/// Chi-square goodness of fit at the 3σ level.
pub fn fits<K: Eq + std::hash::Hash>(observed: &HashMap<K, usize>, expected: &HashMap<K, f64>, draws: usize) -> Check {
    if !observed.keys().all(|k| expected.contains_key(k)) {
        return Err("observed an outcome of probability zero".into());
    }
    let stat = chi2_statistic(observed, expected, draws);
    let crit = chi2_critical(expected.len() - 1, 3.0);
    let msg = format!("chi-square {stat:.2} vs {crit:.2} (df {})", expected.len() - 1);
    if stat < crit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn k2() -> WeightedGraph<f64> {
    WeightedGraph::unit(2, &[(0, 1)]).unwrap()
}

pub fn triangle() -> WeightedGraph<f64> {
    WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
}

pub fn weighted_triangle() -> WeightedGraph<f64> {
    WeightedGraph::from_edges(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0), Edge::new(0, 2, 3.0)]).unwrap()
}

/// Exact law of the blanket time by forward propagation over `(position, visit counts)`.
/// Returns `P(τ = t)` for `t ≤ horizon` and the untouched remainder.
pub fn blanket_law(g: &WeightedGraph<f64>, start: usize, eps: f64, horizon: u64) -> (Vec<f64>, f64) {
    let n = g.n_vertices();
    let mu: Vec<f64> = (0..n).map(|x| g.vertex_weight(x)).collect();
    let m: f64 = mu.iter().sum();
    let mut law = vec![0.0; horizon as usize + 1];
    // state before recording X_{t−1}: (position, counts over X_0..X_{t−2})
    let mut states: HashMap<(usize, Vec<u64>), f64> = HashMap::from([((start, vec![0; n]), 1.0)]);
    for t in 1..=horizon {
        let mut next: HashMap<(usize, Vec<u64>), f64> = HashMap::new();
        for ((x, mut counts), p) in states {
            counts[x] += 1;
            if (0..n).all(|y| m * counts[y] as f64 >= eps * t as f64 * mu[y]) {
                law[t as usize] += p;
                continue;
            }
            for (k, &y) in g.neighbors(x).iter().enumerate() {
                *next.entry((y, counts.clone())).or_default() += p * g.neighbor_weights(x)[k] / mu[x];
            }
        }
        states = next;
    }
    (law, states.values().sum())
}

/// Simulated blanket times against the exact law, cells pooled to at least 20 expected draws.
pub fn check_blanket_law(g: &WeightedGraph<f64>, eps: f64, draws: u64) -> Check {
    let (law, rest) = blanket_law(g, 0, eps, 120);
    let mut cells: Vec<(u64, u64)> = Vec::new();
    let mut expected = HashMap::new();
    let (mut lo, mut acc) = (0u64, 0.0);
    for (t, &p) in law.iter().enumerate() {
        acc += p;
        if acc * draws as f64 >= 20.0 {
            cells.push((lo, t as u64));
            expected.insert(cells.len() - 1, acc);
            lo = t as u64 + 1;
            acc = 0.0;
        }
    }
    // the remainder goes to the last cell, which is open to the right
    let last = cells.len() - 1;
    cells[last].1 = u64::MAX;
    *expected.get_mut(&last).unwrap() += acc + rest;
    let mut observed = HashMap::new();
    for s in 0..draws {
        let Some(tau) = blanket_time_variable(g, 0, eps, 100_000, s).unwrap().tau_blanket else {
            return Err(format!("replicate {s} timed out"));
        };
        let cell = cells.iter().position(|&(a, b)| a <= tau && tau <= b).unwrap();
        *observed.entry(cell).or_insert(0usize) += 1;
    }
    fits(&observed, &expected, draws as usize)
}

/// `P(simple)` of the configuration model on `d = (2, 1, 1)`; exactly 2/3.
pub fn check_config_simple(draws: u64) -> Check {
    let d = DegreeSequence(vec![2, 1, 1]);
    let simple = (0..draws)
        .filter(|&s| {
            let g = sample_configuration_model(&d, seed!(31; "simple", s)).unwrap();
            let mut seen = std::collections::HashSet::new();
            g.edges().iter().all(|e| e.u != e.v && seen.insert((e.u.min(e.v), e.u.max(e.v))))
        })
        .count();
    let p = simple as f64 / draws as f64;
    let msg = format!("P(simple) = {p:.4}, exact 2/3");
    if (p - 2.0 / 3.0).abs() < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Area-tilted labelled trees on three vertices against `P(T) ∝ (1 − p)^{−a(T)}`.
pub fn check_tilted_three(p: f64, draws: u64, pool: usize) -> Check {
    let trees = [vec![(0, 1), (0, 2)], vec![(0, 1), (1, 2)], vec![(0, 2), (1, 2)]];
    let weights: Vec<f64> = trees
        .iter()
        .map(|e| (1.0 - p).powi(-(depth_first_walk_and_area(&PlaneTree::from_edge_list(3, e, 0).unwrap()).area as i32)))
        .collect();
    let z: f64 = weights.iter().sum();
    let expected: HashMap<_, f64> = trees.iter().zip(&weights).map(|(e, w)| (edge_key(e.iter().copied()), w / z)).collect();
    let mut observed = HashMap::new();
    for s in 0..draws {
        let t = sample_tilted_tree(3, p, seed!(32; "tilted", s), pool).unwrap().tree;
        *observed.entry(edge_key(t.edges())).or_insert(0usize) += 1;
    }
    fits(&observed, &expected, draws as usize)
}

fn degree_matches(n: usize, edges: &[(usize, usize)], d: &[usize]) -> bool {
    let mut deg = vec![0; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg == d
}

/// `sample_prescribed_connected` against uniform over all connected simple graphs with degrees `d`.
pub fn check_prescribed_uniform(d: &[usize], draws: u64, pool: usize) -> Check {
    let n = d.len();
    let graphs: Vec<_> = all_simple_graphs(n).into_iter().filter(|e| degree_matches(n, e, d) && is_connected(n, e)).map(edge_key).collect();
    let p = 1.0 / graphs.len() as f64;
    let expected: HashMap<_, f64> = graphs.into_iter().map(|k| (k, p)).collect();
    let mut observed = HashMap::new();
    let seq = DegreeSequence(d.to_vec());
    for s in 0..draws {
        let g = sample_prescribed_connected(&seq, s, pool).unwrap().graph;
        *observed.entry(edge_key(g.edges().iter().map(|e| (e.u, e.v)))).or_insert(0usize) += 1;
    }
    fits(&observed, &expected, draws as usize)
}

/// Min over ordered chains of distinct identifications, each crossed in either direction.
pub fn brute_glued(t: &DiscretizedContinuumTree, pairs: &[(usize, usize)], x: usize, y: usize) -> f64 {
    fn rec(t: &DiscretizedContinuumTree, pairs: &[(usize, usize)], used: &mut Vec<bool>, at: usize, acc: f64, y: usize, best: &mut f64) {
        for i in 0..pairs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let (u, v) = pairs[i];
            for (enter, exit) in [(u, v), (v, u)] {
                let c = acc + t.distance(at, enter);
                *best = best.min(c + t.distance(exit, y));
                rec(t, pairs, used, exit, c, y, best);
            }
            used[i] = false;
        }
    }
    let mut best = t.distance(x, y);
    rec(t, pairs, &mut vec![false; pairs.len()], x, 0.0, y, &mut best);
    best
}

/// Glued quasi-metric against the min-over-orderings formula for `k ≤ 3` identifications.
pub fn check_glue(trials: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let e = sample_excursion(1.0, 1024, seed!(8; "glue", trial)).unwrap();
        let t = excursion_to_tree(&e, 50).unwrap();
        let n = t.n_representatives();
        let k = 1 + trial as usize % 3;
        let pairs: Vec<(usize, usize)> = (0..k).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
        let g = GluedSpace::new(t.clone(), pairs.clone());
        for x in 0..n {
            for y in 0..n {
                worst = worst.max((g.distance(x, y) - brute_glued(&t, &pairs, x, y)).abs());
            }
        }
    }
    let msg = format!("max gap {worst:.2e} over {trials} trees");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn random_metric(n: usize, rng: &mut impl Rng) -> MetricMatrix<f64> {
    // points in the plane give a genuine metric
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0)).collect();
    MetricMatrix::from_fn(MetricKind::ShortestPath, n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt())
}

pub fn random_measure(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() / n as f64 * 2.0 }).collect()
}

/// Smallest `ε` on a grid satisfying both closed-set conditions, checked over every subset.
pub fn prokhorov_oracle(mu: &[f64], nu: &[f64], d: &MetricMatrix<f64>, step: f64) -> f64 {
    let n = mu.len();
    let ok = |eps: f64| {
        (1..1u32 << n).all(|set| {
            let inside = |x: usize| set >> x & 1 == 1;
            let near = |x: usize| (0..n).any(|a| inside(a) && d.get(a, x) <= eps);
            let (ma, na) = ((0..n).filter(|&x| inside(x)).map(|x| mu[x]).sum::<f64>(), (0..n).filter(|&x| inside(x)).map(|x| nu[x]).sum::<f64>());
            let (mn, nn) = ((0..n).filter(|&x| near(x)).map(|x| mu[x]).sum::<f64>(), (0..n).filter(|&x| near(x)).map(|x| nu[x]).sum::<f64>());
            ma <= nn + eps + 1e-12 && na <= mn + eps + 1e-12
        })
    };
    let mut k = 0u64;
    while !ok(k as f64 * step) {
        k += 1;
    }
    k as f64 * step
}

/// Prokhorov distance against the subset oracle on `≤ 5`-atom instances (1e-4 grid).
pub fn check_prokhorov(trials: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = 2 + trial % 4;
        let d = random_metric(n, &mut rng);
        let (mu, nu) = (random_measure(n, &mut rng), random_measure(n, &mut rng));
        let fast = prokhorov_distance(&mu, &nu, &d, true).unwrap();
        let slow = prokhorov_oracle(&mu, &nu, &d, 1e-4);
        if !fast.exact || fast.value > slow + 1e-12 {
            return Err(format!("trial {trial}: {} above oracle {slow}", fast.value));
        }
        worst = worst.max(slow - fast.value);
    }
    let msg = format!("max gap {worst:.2e} over {trials} instances");
    if worst <= 1e-4 + 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Direct minimisation over time changes: each jump of `p` is moved to a candidate
/// position, and both sup terms are evaluated on the merged breakpoints.
pub fn skorokhod_oracle(p: &PcPath, q: &PcPath, d: &MetricMatrix<f64>) -> f64 {
    let t = p.horizon;
    let mut cand: Vec<f64> = (1..1000).map(|i| i as f64 * t / 1000.0).collect();
    for &b in &q.jumps {
        cand.extend([b - 1e-9, b, b + 1e-9]);
    }
    cand.extend(p.jumps.iter().cloned());
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cand.dedup();
    let eval = |s: &[f64]| -> f64 {
        let shift = p.jumps.iter().zip(s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let moved = PcPath { jumps: s.to_vec(), values: p.values.clone(), horizon: t };
        shift + uniform_distance(&moved, q, d)
    };
    let mut best = f64::INFINITY;
    match p.jumps.len() {
        0 => best = eval(&[]),
        1 => {
            for &s in &cand {
                best = best.min(eval(&[s]));
            }
        }
        2 => {
            for (i, &s) in cand.iter().enumerate() {
                for &r in &cand[i + 1..] {
                    best = best.min(eval(&[s, r]));
                }
            }
        }
        _ => unreachable!("oracle handles at most two jumps"),
    }
    best
}

pub fn random_path(n_points: usize, jumps: usize, rng: &mut impl Rng) -> PcPath {
    let mut times: Vec<f64> = Vec::new();
    while times.len() < jumps {
        let t = rng.random_range(1..100) as f64 / 100.0;
        if !times.contains(&t) {
            times.push(t);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut values = vec![rng.random_range(0..n_points)];
    for _ in 0..jumps {
        let mut v = rng.random_range(0..n_points);
        while v == *values.last().unwrap() {
            v = rng.random_range(0..n_points);
        }
        values.push(v);
    }
    PcPath::new(times, values, 1.0).unwrap()
}

/// Skorokhod J1 against the time-change search on `≤ 5`-point spaces (1e-4).
pub fn check_skorokhod(trials: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = 3 + trial % 3;
        let d = random_metric(n, &mut rng);
        let p = random_path(n, trial % 3, &mut rng);
        let q = random_path(n, (trial / 3) % 4, &mut rng);
        let fast = skorokhod_j1(&p, &q, &d).unwrap();
        if fast > uniform_distance(&p, &q, &d) + 1e-12 {
            return Err(format!("trial {trial}: above the uniform distance"));
        }
        worst = worst.max((fast - skorokhod_oracle(&p, &q, &d)).abs());
    }
    let msg = format!("max gap {worst:.2e} over {trials} path pairs");
    if worst < 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}
