//! Maximum matching via Edmonds' blossom algorithm.
//!
//! Augmenting-path search with blossom contraction: a BFS alternates
//! unmatched/matched edges outward from a free vertex; when it closes an odd
//! cycle, the cycle is contracted to its base and the search continues. The
//! scan starts from free vertices in ascending id order and visits neighbors
//! in ascending order, so the same graph always yields the same matching.

use std::collections::VecDeque;

use crate::graph::{Graph, VertexId};

const NONE: usize = usize::MAX;

/// A matching: a set of edges no two of which share an endpoint, stored as a
/// mate table over all vertices of the originating graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    mate: Vec<usize>,
}

impl Matching {
    /// Builds a matching from explicit edges, or `None` if `edges` is not a
    /// matching of `g`.
    pub fn from_edges(g: &Graph, edges: &[(VertexId, VertexId)]) -> Option<Matching> {
        if !is_matching(g, edges) {
            return None;
        }
        let mut mate = vec![NONE; g.vertex_count()];
        for &(u, v) in edges {
            mate[u.0] = v.0;
            mate[v.0] = u.0;
        }
        Some(Matching { mate })
    }

    pub(crate) fn from_mates(mate: Vec<usize>) -> Matching {
        Matching { mate }
    }

    /// Number of matched edges.
    pub fn size(&self) -> usize {
        self.mate.iter().filter(|&&m| m != NONE).count() / 2
    }

    pub fn mate(&self, v: VertexId) -> Option<VertexId> {
        match self.mate[v.0] {
            NONE => None,
            m => Some(VertexId(m)),
        }
    }

    pub fn is_matched(&self, v: VertexId) -> bool {
        self.mate[v.0] != NONE
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.mate[u.0] == v.0
    }

    /// Matched edges as `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(v, &m)| m != NONE && v < m)
            .map(|(v, &m)| (VertexId(v), VertexId(m)))
            .collect()
    }
}

/// Checks whether `edges` is a matching of `g`: every pair must be an actual
/// edge and no vertex may appear twice. Takes raw pairs rather than a
/// [`Matching`] so that invalid candidates are representable.
pub fn is_matching(g: &Graph, edges: &[(VertexId, VertexId)]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    for &(u, v) in edges {
        if u.0 >= used.len() || v.0 >= used.len() || !g.has_edge(u, v) {
            return false;
        }
        if used[u.0] || used[v.0] {
            return false;
        }
        used[u.0] = true;
        used[v.0] = true;
    }
    true
}

/// Computes a maximum matching of `g`.
pub fn maximum_matching(g: &Graph) -> Matching {
    let adj: Vec<Vec<usize>> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().map(|w| w.0).collect())
        .collect();
    Matching { mate: maximum_matching_indices(&adj) }
}

/// Blossom search over plain index adjacency lists. Shared with the oracle,
/// which needs matching bounds on subgraphs without building [`Graph`]s.
/// Lists must be symmetric; they should be sorted for deterministic output.
pub(crate) fn maximum_matching_indices(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut search = Search {
        adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
    };
    for v in 0..n {
        if search.mate[v] == NONE {
            let finish = search.find_augmenting_path(v);
            if finish != NONE {
                search.augment(finish);
            }
        }
    }
    search.mate
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    /// `mate[v]` is v's partner or `NONE`.
    mate: Vec<usize>,
    /// BFS tree pointers, set on inner (oddly-reached) vertices.
    parent: Vec<usize>,
    /// Representative of the contracted blossom containing each vertex.
    base: Vec<usize>,
}

impl Search<'_> {
    /// Grows an alternating BFS tree from the free vertex `start`. Returns a
    /// free vertex ending an augmenting path, or `NONE` if none exists.
    fn find_augmenting_path(&mut self, start: usize) -> usize {
        let n = self.adj.len();
        self.parent.fill(NONE);
        for (v, b) in self.base.iter_mut().enumerate() {
            *b = v;
        }
        let mut in_queue = vec![false; n];
        let mut queue = VecDeque::from([start]);
        in_queue[start] = true;
        while let Some(v) = queue.pop_front() {
            for &to in &self.adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == start || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // Edge between two outer vertices closes an odd cycle:
                    // contract it to the base of the cycle.
                    let cur_base = self.lowest_common_base(v, to);
                    let mut in_blossom = vec![false; n];
                    self.mark_path(v, cur_base, to, &mut in_blossom);
                    self.mark_path(to, cur_base, v, &mut in_blossom);
                    for u in 0..n {
                        if in_blossom[self.base[u]] {
                            self.base[u] = cur_base;
                            if !in_queue[u] {
                                in_queue[u] = true;
                                queue.push_back(u);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    // `to` is matched: its mate becomes an outer vertex.
                    in_queue[self.mate[to]] = true;
                    queue.push_back(self.mate[to]);
                }
            }
        }
        NONE
    }

    /// Walks both tree paths toward the root and returns the first common
    /// blossom base: the base of the newly found odd cycle.
    fn lowest_common_base(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    /// Marks the blossom bases on the tree path from `v` down to base `b`
    /// and rethreads parent pointers so the cycle can be traversed from
    /// either direction when augmenting.
    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize, in_blossom: &mut [bool]) {
        while self.base[v] != b {
            in_blossom[self.base[v]] = true;
            in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Flips matched/unmatched edges along the tree path ending at the free
    /// vertex `finish`.
    fn augment(&mut self, finish: usize) {
        let mut cur = finish;
        loop {
            let prev = self.parent[cur];
            let next = self.mate[prev];
            self.mate[cur] = prev;
            self.mate[prev] = cur;
            if next == NONE {
                break;
            }
            cur = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn ids(pairs: &[(usize, usize)]) -> Vec<(VertexId, VertexId)> {
        pairs.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect()
    }

    #[test]
    fn nine_vertex_example_matching_is_pinned() {
        // Worked example used across the crate: a 9-vertex tree-with-cycles
        // whose maximum matching the pipeline's goldens depend on.
        let g = Graph::from_indexed_edges(
            9,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 7), (3, 5), (3, 8), (4, 6), (5, 6)],
        );
        let m = maximum_matching(&g);
        assert_eq!(m.edges(), ids(&[(0, 1), (2, 7), (3, 5), (4, 6)]));
        assert_eq!(m.size(), 4);
    }

    #[test]
    fn odd_cycle_sizes() {
        let c5 = Graph::from_indexed_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert_eq!(maximum_matching(&c5).size(), 2);
        let c3 = Graph::from_indexed_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(maximum_matching(&c3).size(), 1);
    }

    #[test]
    fn small_shapes() {
        assert_eq!(maximum_matching(&Graph::from_indexed_edges(0, [])).size(), 0);
        assert_eq!(maximum_matching(&Graph::from_indexed_edges(1, [])).size(), 0);
        let p4 = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(maximum_matching(&p4).edges(), ids(&[(0, 1), (2, 3)]));
        let k4 =
            Graph::from_indexed_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(maximum_matching(&k4).size(), 2);
        let star = Graph::from_indexed_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(maximum_matching(&star).size(), 1);
    }

    #[test]
    fn blossom_contraction_rewires_greedy_choices() {
        // Triangle hanging off a path: the ascending greedy pass first takes
        // (0,1), and matching vertex 4 requires flipping inside the odd
        // cycle {1,2,3}.
        let g = Graph::from_indexed_edges(5, [(0, 1), (1, 2), (1, 3), (2, 3), (3, 4)]);
        let m = maximum_matching(&g);
        assert_eq!(m.size(), 2);
        assert!(is_matching(&g, &m.edges()));
        // Petersen graph has a perfect matching; finding it exercises
        // nontrivial blossom handling.
        let petersen = Graph::from_indexed_edges(
            10,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        );
        assert_eq!(maximum_matching(&petersen).size(), 5);
    }

    #[test]
    fn is_matching_accepts_only_disjoint_real_edges() {
        let p3 = Graph::from_indexed_edges(3, [(0, 1), (1, 2)]);
        assert!(is_matching(&p3, &ids(&[(0, 1)])));
        assert!(is_matching(&p3, &ids(&[(1, 0)])));
        assert!(is_matching(&p3, &[]));
        // Shared endpoint.
        assert!(!is_matching(&p3, &ids(&[(0, 1), (1, 2)])));
        // Not an edge.
        assert!(!is_matching(&p3, &ids(&[(0, 2)])));
        // Loop.
        assert!(!is_matching(&p3, &ids(&[(1, 1)])));
        // Out-of-range endpoint.
        assert!(!is_matching(&p3, &ids(&[(0, 7)])));
    }

    #[test]
    fn from_edges_round_trips() {
        let p4 = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let m = Matching::from_edges(&p4, &ids(&[(2, 3)])).unwrap();
        assert_eq!(m.size(), 1);
        assert_eq!(m.mate(VertexId(2)), Some(VertexId(3)));
        assert_eq!(m.mate(VertexId(0)), None);
        assert!(m.contains_edge(VertexId(3), VertexId(2)));
        assert!(!m.contains_edge(VertexId(1), VertexId(2)));
        assert!(Matching::from_edges(&p4, &ids(&[(0, 1), (1, 2)])).is_none());
    }

    #[test]
    fn matching_is_deterministic() {
        let g = Graph::from_indexed_edges(
            8,
            [(0, 2), (0, 3), (1, 2), (1, 4), (2, 5), (3, 6), (4, 7), (5, 6), (6, 7)],
        );
        let a = maximum_matching(&g);
        let b = maximum_matching(&g);
        assert_eq!(a.edges(), b.edges());
    }
}
