//! Plain-text graph files: a header line `n m` followed by `m` lines `u v w`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::{stationary_measure, Edge, GraphError, WeightedGraph};
use crate::scalar::Real;

pub fn parse_graph<R: Real>(text: &str) -> Result<WeightedGraph<R>, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(GraphError::Parse { line: 0, message: "missing header".into() })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(GraphError::Parse { line: hline, message: "header must be `n m`".into() });
    }
    let n: usize = parse_field(hline, head[0])?;
    let m: usize = parse_field(hline, head[1])?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(GraphError::Parse { line, message: "edge line must be `u v w`".into() });
        }
        let w: f64 = parse_field(line, f[2])?;
        edges.push(Edge::new(parse_field(line, f[0])?, parse_field(line, f[1])?, R::lit(w)));
    }
    if edges.len() != m {
        return Err(GraphError::Parse { line: hline, message: format!("header declares {m} edges, found {}", edges.len()) });
    }
    let mut seen = HashSet::new();
    let multigraph = edges.iter().any(|e| e.u == e.v || !seen.insert((e.u.min(e.v), e.u.max(e.v))));
    WeightedGraph::possibly_disconnected(n, edges, multigraph)
}

fn parse_field<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, GraphError> {
    s.parse().map_err(|_| GraphError::Parse { line, message: format!("cannot parse `{s}`") })
}

pub fn write_graph<R: Real>(g: &WeightedGraph<R>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n_vertices(), g.n_edges());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
    }
    out
}

/// Summary printed by `graph stats`.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub total_mass: f64,
    /// Hop diameter of the largest component.
    pub diameter: usize,
    pub components: usize,
}

impl GraphStats {
    pub fn of<R: Real>(g: &WeightedGraph<R>) -> Self {
        Self {
            n: g.n_vertices(),
            m: g.n_edges(),
            total_mass: stationary_measure(g).total_mass.to_f64_lossy(),
            diameter: g.hop_diameter(),
            components: g.component_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = WeightedGraph::<f64>::from_edges(3, vec![Edge::new(0, 1, 1.5), Edge::new(1, 2, 2.0)]).unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "3 2\n0 1 1.5\n1 2 2\n");
        let h: WeightedGraph<f64> = parse_graph(&text).unwrap();
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn stats_of_path() {
        let g: WeightedGraph<f64> = parse_graph("# path\n4 3\n0 1 1\n1 2 1\n2 3 1\n").unwrap();
        let s = GraphStats::of(&g);
        assert_eq!((s.n, s.m, s.diameter, s.components), (4, 3, 3, 1));
        assert_eq!(s.total_mass, 6.0);
    }

    #[test]
    fn self_loop_marks_multigraph() {
        let g: WeightedGraph<f64> = parse_graph("2 2\n0 1 1\n1 1 1\n").unwrap();
        assert!(g.is_multigraph());
    }

    #[test]
    fn count_mismatch_rejected() {
        assert!(matches!(parse_graph::<f64>("3 3\n0 1 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph::<f64>("3 1\n0 x 1\n"), Err(GraphError::Parse { .. })));
    }
}
