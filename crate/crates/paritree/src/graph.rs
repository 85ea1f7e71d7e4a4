//! Small digraph helpers over dense node ids.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components of the digraph on `0..n`, sinks first.
pub(crate) fn sccs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (v, w) in arcs {
        g.add_edge(NodeIndex::new(v), NodeIndex::new(w), ());
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Nodes lying on some directed cycle.
pub(crate) fn on_cycle(n: usize, arcs: &[(usize, usize)]) -> Vec<bool> {
    let mut out = vec![false; n];
    for &(v, w) in arcs {
        if v == w {
            out[v] = true;
        }
    }
    for c in sccs(n, arcs.iter().copied()) {
        if c.len() > 1 {
            for v in c {
                out[v] = true;
            }
        }
    }
    out
}
