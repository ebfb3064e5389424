#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

/// Upper `z`-sigma critical value of a chi-square law (Wilson–Hilferty).
pub fn chi2_critical(df: usize, z: f64) -> f64 {
    let k = df as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Pearson statistic of observed counts against exact probabilities.
pub fn chi2_statistic<K: Eq + Hash>(observed: &HashMap<K, usize>, expected: &HashMap<K, f64>, draws: usize) -> f64 {
    assert!(observed.keys().all(|k| expected.contains_key(k)), "observed an outcome of probability zero");
    expected
        .iter()
        .map(|(k, &p)| {
            let o = *observed.get(k).unwrap_or(&0) as f64;
            let e = p * draws as f64;
            (o - e).powi(2) / e
        })
        .sum()
}

/// Asserts a chi-square goodness of fit at the 3σ level and returns the statistic.
pub fn assert_fits<K: Eq + Hash>(observed: &HashMap<K, usize>, expected: &HashMap<K, f64>, draws: usize) -> f64 {
    let stat = chi2_statistic(observed, expected, draws);
    let crit = chi2_critical(expected.len() - 1, 3.0);
    assert!(stat < crit, "chi-square {stat:.2} exceeds {crit:.2} (df {})", expected.len() - 1);
    stat
}

/// Sorted undirected edge list, the canonical key of a labelled simple graph.
pub fn edge_key(edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    e.sort_unstable();
    e
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every simple labelled graph on `0..n`, as edge lists.
pub fn all_simple_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    (0u64..(1 << pairs.len()))
        .map(|mask| (0..pairs.len()).filter(|&b| mask >> b & 1 == 1).map(|b| pairs[b]).collect())
        .collect()
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
pub mod oracles;
