use serde::Serialize;

use super::PlaneTree;

/// Depth-first walk `X(i) = |O(i)| − 1`, `i = 0..m−1`, and the area `a(T) = Σ X(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LukasiewiczPath {
    pub x_values: Vec<usize>,
    pub area: usize,
}

/// Runs the stack exploration and calls `visit(i, v_i, open)` with the explored
/// vertex and the open set `O(i)` (top of stack last) at each step.
fn explore(t: &PlaneTree, mut visit: impl FnMut(usize, usize, &[usize])) {
    let mut stack = vec![t.root()];
    let mut i = 0;
    while let Some(&v) = stack.last() {
        visit(i, v, &stack);
        stack.pop();
        stack.extend(t.children(v).iter().rev());
        i += 1;
    }
}

/// Depth-first walk of a plane tree; children are explored in plane order.
pub fn depth_first_walk_and_area(t: &PlaneTree) -> LukasiewiczPath {
    let mut x_values = Vec::with_capacity(t.n_vertices());
    explore(t, |_, _, open| x_values.push(open.len() - 1));
    let area = x_values.iter().sum();
    LukasiewiczPath { x_values, area }
}

/// Non-tree edges whose addition leaves the depth-first tree unchanged: at step `i`,
/// the explored vertex joined to each other open vertex.
pub fn permitted_edges(t: &PlaneTree) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    explore(t, |_, v, open| {
        for &w in &open[..open.len() - 1] {
            out.push((v.min(w), v.max(w)));
        }
    });
    out
}

/// Depth-first tree of a connected graph on `0..n` started at vertex 0, unseen
/// neighbors placed on the stack so that the smallest label is explored first.
/// Returns `None` if the graph is disconnected.
pub fn depth_first_tree(n: usize, edges: &[(usize, usize)]) -> Option<PlaneTree> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut seen = vec![false; n];
    let mut parent = vec![None; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in adj[v].iter().rev() {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return None;
    }
    PlaneTree::from_parents(&parent).ok()
}
