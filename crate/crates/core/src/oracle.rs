//! Exact oracles used to validate the heuristic pipeline.
//!
//! [`exact_mvc`] is a branch-and-bound search over bitmask adjacency: branch
//! on a maximum-degree vertex (take it, or take its whole neighborhood),
//! pruning with the maximum-matching lower bound. It is exact and practical
//! to roughly forty vertices. [`exact_mvc_exhaustive`] checks every vertex
//! subset and [`exact_max_matching_exhaustive`] every edge subset; both are
//! deliberately brute force so the cleverer implementations can be validated
//! against them on small instances.

use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::matching::{maximum_matching, maximum_matching_indices};
use crate::solver::CoverResult;

/// Largest vertex count [`exact_mvc`] accepts by default.
pub const MVC_VERTEX_LIMIT: usize = 40;
/// Largest vertex count [`exact_mvc_exhaustive`] accepts.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 22;
/// Largest edge count [`exact_max_matching_exhaustive`] accepts.
pub const EXHAUSTIVE_EDGE_LIMIT: usize = 24;

/// Size-limit violations; oracles refuse instances they cannot finish.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {actual} vertices; this oracle handles at most {limit}")]
    TooManyVertices { actual: usize, limit: usize },
    #[error("graph has {actual} edges; this oracle handles at most {limit}")]
    TooManyEdges { actual: usize, limit: usize },
}

/// Exact minimum vertex cover by branch and bound, up to
/// [`MVC_VERTEX_LIMIT`] vertices.
pub fn exact_mvc(g: &Graph) -> Result<CoverResult, OracleError> {
    exact_mvc_with_limit(g, MVC_VERTEX_LIMIT)
}

/// [`exact_mvc`] with an explicit vertex limit (at most 64, the mask width).
pub fn exact_mvc_with_limit(g: &Graph, limit: usize) -> Result<CoverResult, OracleError> {
    assert!(limit <= 64, "bitmask oracle is limited to 64 vertices");
    let m = g.vertex_count();
    if m > limit {
        return Err(OracleError::TooManyVertices { actual: m, limit });
    }
    let adj: Vec<u64> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |acc, w| acc | (1 << w.0)))
        .collect();
    // Any cover is a valid starting incumbent; all non-isolated vertices is
    // the cheapest one to hand over.
    let mut best: Vec<usize> = (0..m).filter(|&v| adj[v] != 0).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let active = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    branch(&adj, active, &mut chosen, &mut best);
    best.sort_unstable();

    let cover: Vec<VertexId> = best.into_iter().map(VertexId).collect();
    for &(u, v) in g.edges() {
        assert!(
            cover.binary_search(&u).is_ok() || cover.binary_search(&v).is_ok(),
            "oracle produced a non-cover"
        );
    }
    Ok(CoverResult {
        size: cover.len(),
        cover,
        seed: None,
        matching_lower_bound: maximum_matching(g).size(),
        verified_cover: true,
        // Certified by exhaustive search, not by the matching bound.
        optimal_certified: true,
    })
}

fn branch(adj: &[u64], active: u64, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
    // Highest-degree vertex among the active ones, smallest id on ties.
    let mut pick = usize::MAX;
    let mut max_deg = 0;
    for v in bits(active) {
        let deg = (adj[v] & active).count_ones() as usize;
        if deg > max_deg {
            max_deg = deg;
            pick = v;
        }
    }
    if max_deg == 0 {
        // No edges left: `chosen` covers everything.
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    if chosen.len() + matching_bound(adj, active) >= best.len() {
        return;
    }
    // Either `pick` is in the cover...
    chosen.push(pick);
    branch(adj, active & !(1 << pick), chosen, best);
    chosen.pop();
    // ...or it is not, forcing its entire active neighborhood in.
    let nbrs = adj[pick] & active;
    let before = chosen.len();
    chosen.extend(bits(nbrs));
    branch(adj, active & !nbrs & !(1 << pick), chosen, best);
    chosen.truncate(before);
}

/// Maximum matching size of the active subgraph: a lower bound on the
/// vertices still needed, since covering each matched edge costs one.
fn matching_bound(adj: &[u64], active: u64) -> usize {
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); adj.len()];
    for v in bits(active) {
        lists[v] = bits(adj[v] & active).collect();
    }
    let mate = maximum_matching_indices(&lists);
    mate.iter().filter(|&&m| m != usize::MAX).count() / 2
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        }
    })
}

/// Minimum vertex cover size by trying every vertex subset. Exponential in
/// the vertex count; exists to validate [`exact_mvc`].
pub fn exact_mvc_exhaustive(g: &Graph) -> Result<usize, OracleError> {
    let m = g.vertex_count();
    if m > EXHAUSTIVE_VERTEX_LIMIT {
        return Err(OracleError::TooManyVertices { actual: m, limit: EXHAUSTIVE_VERTEX_LIMIT });
    }
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (u.0, v.0)).collect();
    let mut best = m;
    'subsets: for mask in 0u32..(1u32 << m) {
        if (mask.count_ones() as usize) >= best {
            continue;
        }
        for &(u, v) in &edges {
            if mask & (1 << u) == 0 && mask & (1 << v) == 0 {
                continue 'subsets;
            }
        }
        best = mask.count_ones() as usize;
    }
    Ok(best)
}

/// Maximum matching size by trying every edge subset (include/exclude
/// backtracking). Exists to validate the blossom implementation.
pub fn exact_max_matching_exhaustive(g: &Graph) -> Result<usize, OracleError> {
    let n = g.edge_count();
    if n > EXHAUSTIVE_EDGE_LIMIT {
        return Err(OracleError::TooManyEdges { actual: n, limit: EXHAUSTIVE_EDGE_LIMIT });
    }
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (u.0, v.0)).collect();
    let mut used = vec![false; g.vertex_count()];
    let mut best = 0;
    explore(&edges, 0, &mut used, 0, &mut best);
    Ok(best)
}

fn explore(edges: &[(usize, usize)], i: usize, used: &mut [bool], count: usize, best: &mut usize) {
    if count + (edges.len() - i) <= *best {
        return;
    }
    if i == edges.len() {
        *best = count;
        return;
    }
    let (u, v) = edges[i];
    // Include first: reaching large matchings early tightens the prune.
    if !used[u] && !used[v] {
        used[u] = true;
        used[v] = true;
        explore(edges, i + 1, used, count + 1, best);
        used[u] = false;
        used[v] = false;
    }
    explore(edges, i + 1, used, count, best);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(m: usize) -> Graph {
        Graph::from_indexed_edges(m, (1..m).map(|i| (i - 1, i)))
    }

    fn cycle(m: usize) -> Graph {
        Graph::from_indexed_edges(m, (0..m).map(|i| (i, (i + 1) % m)))
    }

    fn complete(m: usize) -> Graph {
        Graph::from_indexed_edges(m, (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))))
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_indexed_edges(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    #[test]
    fn closed_forms_for_paths_cycles_cliques_stars() {
        for m in 1..=10 {
            assert_eq!(exact_mvc(&path(m)).unwrap().size, m / 2, "path on {m}");
            assert_eq!(exact_mvc_exhaustive(&path(m)).unwrap(), m / 2);
            assert_eq!(exact_mvc(&complete(m)).unwrap().size, m - 1, "clique on {m}");
            if m >= 3 {
                assert_eq!(exact_mvc(&cycle(m)).unwrap().size, m.div_ceil(2), "cycle on {m}");
                assert_eq!(exact_mvc_exhaustive(&cycle(m)).unwrap(), m.div_ceil(2));
            }
            if m >= 1 {
                assert_eq!(exact_mvc(&star(m)).unwrap().size, 1.min(m), "star with {m} leaves");
            }
        }
    }

    #[test]
    fn branch_and_bound_matches_exhaustive_on_fixed_graphs() {
        let graphs = [
            Graph::from_indexed_edges(0, []),
            Graph::from_indexed_edges(1, []),
            Graph::from_indexed_edges(
                9,
                [(0, 1), (1, 2), (1, 3), (2, 4), (2, 7), (3, 5), (3, 8), (4, 6), (5, 6)],
            ),
            Graph::from_indexed_edges(6, [(0, 1), (2, 3), (4, 5)]),
            Graph::from_indexed_edges(7, [(0, 1), (0, 2), (1, 2), (3, 4), (5, 6), (2, 3)]),
            complete(6),
            cycle(7),
        ];
        for g in &graphs {
            let bb = exact_mvc(g).unwrap();
            assert_eq!(bb.size, exact_mvc_exhaustive(g).unwrap(), "mismatch on {g}");
            assert!(bb.size >= bb.matching_lower_bound);
            assert!(bb.verified_cover && bb.optimal_certified);
            assert!(bb.seed.is_none());
        }
    }

    #[test]
    fn nine_vertex_example_optimum_is_four() {
        let g = Graph::from_indexed_edges(
            9,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 7), (3, 5), (3, 8), (4, 6), (5, 6)],
        );
        let first = exact_mvc(&g).unwrap();
        assert_eq!(first.size, 4);
        assert_eq!(first.matching_lower_bound, 4);
        assert_eq!(exact_mvc(&g).unwrap(), first, "oracle must be deterministic");
    }

    #[test]
    fn matching_oracle_agrees_with_blossom() {
        let petersen = Graph::from_indexed_edges(
            10,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        );
        let graphs = [petersen, cycle(5), cycle(9), path(8), complete(6), star(5)];
        for g in &graphs {
            assert_eq!(
                exact_max_matching_exhaustive(g).unwrap(),
                maximum_matching(g).size(),
                "mismatch on {g}"
            );
        }
    }

    #[test]
    fn limits_are_enforced() {
        assert_eq!(
            exact_mvc(&Graph::from_indexed_edges(41, [])).unwrap_err(),
            OracleError::TooManyVertices { actual: 41, limit: 40 }
        );
        assert_eq!(
            exact_mvc_exhaustive(&Graph::from_indexed_edges(23, [])).unwrap_err(),
            OracleError::TooManyVertices { actual: 23, limit: 22 }
        );
        assert_eq!(
            exact_max_matching_exhaustive(&path(26)).unwrap_err(),
            OracleError::TooManyEdges { actual: 25, limit: 24 }
        );
        assert!(exact_mvc_with_limit(&Graph::from_indexed_edges(41, []), 64).is_ok());
    }

    #[test]
    fn oracle_handles_disconnected_graphs() {
        let g = Graph::from_indexed_edges(7, [(0, 1), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(exact_mvc(&g).unwrap().size, 3);
        assert_eq!(exact_mvc_exhaustive(&g).unwrap(), 3);
    }
}
