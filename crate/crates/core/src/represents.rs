//! Level-guided maximal matching and its table of represented vertices.
//!
//! Working on a deletable copy of the graph, the procedure walks BFS levels
//! outward from the seed. Within a level it repeatedly selects an edge,
//! appends a table row recording both endpoints together with everything
//! they could still reach (their "represents" lists), marks the endpoints
//! visited, and deletes their incident edges. A vertex whose working edges
//! all disappear is marked visited without joining the matching. The matched
//! endpoints form a vertex cover; the companion minimization pass
//! ([`crate::localmin`]) then shrinks it using the recorded lists.
//!
//! Edge selection prefers, in order: same-level edges inside the maximum
//! matching, same-level edges outside it, edges into the next level inside
//! the matching, then edges into the next level outside it. Ties fall to the
//! lexicographically smallest endpoint pair. An alternative mode picks the
//! smallest unvisited vertex first and applies the same tier order among its
//! edges only; the differential harness uses it to probe how sensitive
//! results are to selection order.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::graph::{BfsLevels, Graph, VertexId};
use crate::matching::{is_matching, Matching};
use crate::trace::{NullSink, TraceData, TraceEvent, TraceSink};

/// Edge-selection policy for the guided matching.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelectionMode {
    /// Pick the best tier across the whole current level (the normative
    /// mode).
    #[default]
    TierFirst,
    /// Pick the smallest unvisited vertex, then the best tier among its
    /// edges (exploration mode for the harness).
    VertexFirst,
}

impl SelectionMode {
    pub fn label(self) -> &'static str {
        match self {
            SelectionMode::TierFirst => "tier-first",
            SelectionMode::VertexFirst => "vertex-first",
        }
    }
}

/// Lifecycle of a matched endpoint during minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointStatus {
    Active,
    /// Committed to the cover.
    Frozen,
    /// Excluded from the cover.
    Removed,
}

impl EndpointStatus {
    pub fn label(self) -> &'static str {
        match self {
            EndpointStatus::Active => "active",
            EndpointStatus::Frozen => "frozen",
            EndpointStatus::Removed => "removed",
        }
    }
}

/// Which endpoint of a row a vertex is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
}

/// One matched edge plus the vertices each endpoint represented (its
/// surviving working-copy neighbors) at the moment the edge was selected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentsRow {
    pub(crate) node1: VertexId,
    pub(crate) node2: VertexId,
    pub(crate) list1: Vec<VertexId>,
    pub(crate) list2: Vec<VertexId>,
    pub(crate) status1: EndpointStatus,
    pub(crate) status2: EndpointStatus,
}

impl RepresentsRow {
    pub fn node1(&self) -> VertexId {
        self.node1
    }

    pub fn node2(&self) -> VertexId {
        self.node2
    }

    pub fn list1(&self) -> &[VertexId] {
        &self.list1
    }

    pub fn list2(&self) -> &[VertexId] {
        &self.list2
    }

    pub fn status1(&self) -> EndpointStatus {
        self.status1
    }

    pub fn status2(&self) -> EndpointStatus {
        self.status2
    }

    pub fn node(&self, side: Side) -> VertexId {
        match side {
            Side::One => self.node1,
            Side::Two => self.node2,
        }
    }

    pub fn list(&self, side: Side) -> &[VertexId] {
        match side {
            Side::One => &self.list1,
            Side::Two => &self.list2,
        }
    }

    pub fn status(&self, side: Side) -> EndpointStatus {
        match side {
            Side::One => self.status1,
            Side::Two => self.status2,
        }
    }
}

/// The guided matching's output table. Rows appear in selection order; the
/// endpoints of all rows form a vertex cover of the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentsTable {
    pub(crate) rows: Vec<RepresentsRow>,
    /// Per graph vertex: the row and side where it is an endpoint, if any.
    pub(crate) locator: Vec<Option<(usize, Side)>>,
    /// Vertices frozen so far, in freeze order (grown by minimization).
    pub(crate) frozen: Vec<VertexId>,
}

impl RepresentsTable {
    pub fn rows(&self) -> &[RepresentsRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of vertices in the originating graph.
    pub fn vertex_count(&self) -> usize {
        self.locator.len()
    }

    pub fn is_endpoint(&self, v: VertexId) -> bool {
        self.locator[v.0].is_some()
    }

    pub fn locate(&self, v: VertexId) -> Option<(usize, Side)> {
        self.locator[v.0]
    }

    /// Row index of an endpoint vertex. Panics if `v` is not an endpoint.
    pub fn row_of(&self, v: VertexId) -> usize {
        self.locator[v.0].expect("not an endpoint").0
    }

    pub fn status_of(&self, v: VertexId) -> EndpointStatus {
        let (row, side) = self.locator[v.0].expect("not an endpoint");
        self.rows[row].status(side)
    }

    pub fn list_of(&self, v: VertexId) -> &[VertexId] {
        let (row, side) = self.locator[v.0].expect("not an endpoint");
        self.rows[row].list(side)
    }

    pub fn partner_of(&self, v: VertexId) -> VertexId {
        let (row, side) = self.locator[v.0].expect("not an endpoint");
        match side {
            Side::One => self.rows[row].node2,
            Side::Two => self.rows[row].node1,
        }
    }

    /// The matched edges as a [`Matching`] over the originating graph.
    pub fn matched_edges(&self) -> Matching {
        let mut mate = vec![usize::MAX; self.locator.len()];
        for r in &self.rows {
            mate[r.node1.0] = r.node2.0;
            mate[r.node2.0] = r.node1.0;
        }
        Matching::from_mates(mate)
    }

    /// Vertices frozen by minimization so far, in freeze order.
    pub fn frozen_order(&self) -> &[VertexId] {
        &self.frozen
    }

    /// All endpoints in table order: row by row, first endpoint then second.
    /// Scans over the table use this order everywhere.
    pub(crate) fn endpoints_in_table_order(&self) -> Vec<VertexId> {
        self.rows.iter().flat_map(|r| [r.node1, r.node2]).collect()
    }

    pub(crate) fn set_status(&mut self, v: VertexId, status: EndpointStatus) {
        let (row, side) = self.locator[v.0].expect("not an endpoint");
        match side {
            Side::One => self.rows[row].status1 = status,
            Side::Two => self.rows[row].status2 = status,
        }
    }

    pub(crate) fn clear_list(&mut self, v: VertexId) {
        let (row, side) = self.locator[v.0].expect("not an endpoint");
        match side {
            Side::One => self.rows[row].list1.clear(),
            Side::Two => self.rows[row].list2.clear(),
        }
    }

    /// Deletes `v` from every endpoint's list.
    pub(crate) fn remove_from_all_lists(&mut self, v: VertexId) {
        for row in &mut self.rows {
            row.list1.retain(|&x| x != v);
            row.list2.retain(|&x| x != v);
        }
    }

    pub(crate) fn push_frozen(&mut self, v: VertexId) {
        self.frozen.push(v);
    }

    /// Serializes rows with vertex names in table order.
    pub fn to_json(&self, g: &Graph) -> Value {
        let name = |v: &VertexId| Value::String(g.name(*v).to_string());
        let names = |vs: &[VertexId]| Value::Array(vs.iter().map(name).collect());
        Value::Array(
            self.rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "row": i,
                        "node1": name(&r.node1),
                        "list1": names(&r.list1),
                        "status1": r.status1.label(),
                        "node2": name(&r.node2),
                        "list2": names(&r.list2),
                        "status2": r.status2.label(),
                    })
                })
                .collect(),
        )
    }
}

/// Runs the guided maximal matching in the normative tier-first mode without
/// tracing. See [`guided_maximal_matching_with`].
pub fn guided_maximal_matching(g: &Graph, em: &Matching, levels: &BfsLevels) -> RepresentsTable {
    guided_maximal_matching_with(g, em, levels, SelectionMode::TierFirst, &mut NullSink)
}

/// Extracts a maximal matching guided by `em` (a maximum matching of `g`)
/// and the BFS `levels`, recording a represents-row per matched edge.
///
/// The graph must be connected (a requirement inherited from `levels`).
/// On return: every edge of `g` has a matched endpoint, no working edge
/// survives at or below a completed level, and the number of rows never
/// exceeds `em.size()`. All three are asserted.
pub fn guided_maximal_matching_with(
    g: &Graph,
    em: &Matching,
    levels: &BfsLevels,
    mode: SelectionMode,
    sink: &mut dyn TraceSink,
) -> RepresentsTable {
    let m = g.vertex_count();
    debug_assert!(is_matching(g, &em.edges()), "guide is not a matching of g");
    assert_eq!(
        levels.levels().iter().map(Vec::len).sum::<usize>(),
        m,
        "levels must partition the vertex set"
    );

    // Deletable working copy of the adjacency structure.
    let mut work: Vec<BTreeSet<VertexId>> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut visited = vec![false; m];
    for v in 0..m {
        // Vertices with no edges can never be matched; mark them visited so
        // the per-level loop terminates on them immediately.
        if work[v].is_empty() {
            visited[v] = true;
        }
    }

    let mut rows: Vec<RepresentsRow> = Vec::new();
    let mut locator: Vec<Option<(usize, Side)>> = vec![None; m];

    for (level_idx, level) in levels.levels().iter().enumerate() {
        while level.iter().any(|&v| !visited[v.0]) {
            let (a, b, tier) = match mode {
                SelectionMode::TierFirst => select_tier_first(&work, levels, level, level_idx, em),
                SelectionMode::VertexFirst => {
                    select_vertex_first(&work, levels, level, level_idx, em, &visited)
                }
            };
            sink.emit(TraceEvent {
                seed: None,
                data: TraceData::EdgeSelected { a, b, tier, level: level_idx },
            });
            let list1: Vec<VertexId> = work[a.0].iter().copied().collect();
            let list2: Vec<VertexId> = work[b.0].iter().copied().collect();
            debug_assert!(list1.contains(&b) && list2.contains(&a), "row lists must contain the partner");
            let row = rows.len();
            sink.emit(TraceEvent {
                seed: None,
                data: TraceData::RowAppended {
                    row,
                    node1: a,
                    list1: list1.clone(),
                    node2: b,
                    list2: list2.clone(),
                },
            });
            locator[a.0] = Some((row, Side::One));
            locator[b.0] = Some((row, Side::Two));
            rows.push(RepresentsRow {
                node1: a,
                node2: b,
                list1,
                list2,
                status1: EndpointStatus::Active,
                status2: EndpointStatus::Active,
            });
            visited[a.0] = true;
            visited[b.0] = true;
            for x in [a, b] {
                let gone: Vec<VertexId> = work[x.0].iter().copied().collect();
                work[x.0].clear();
                for w in gone {
                    work[w.0].remove(&x);
                    if work[w.0].is_empty() {
                        visited[w.0] = true;
                    }
                }
            }
        }
        for &v in level {
            assert!(
                work[v.0].is_empty(),
                "working edge survived past completed level {level_idx}"
            );
        }
    }

    let table = RepresentsTable { rows, locator, frozen: Vec::new() };
    for &(u, v) in g.edges() {
        assert!(
            table.is_endpoint(u) || table.is_endpoint(v),
            "edge {u}-{v} has no matched endpoint: the endpoint set is not a cover"
        );
    }
    assert!(
        table.rows.len() <= em.size(),
        "maximal matching larger than the maximum matching"
    );
    table
}

/// Tier-first selection: best (tier, endpoint pair) over the whole level.
/// Same-level edges are keyed `(smaller, larger)`; edges into the next level
/// are keyed `(current-level endpoint, next-level endpoint)`.
fn select_tier_first(
    work: &[BTreeSet<VertexId>],
    levels: &BfsLevels,
    level: &[VertexId],
    level_idx: usize,
    em: &Matching,
) -> (VertexId, VertexId, u8) {
    let mut best: Option<(u8, VertexId, VertexId)> = None;
    for &u in level {
        for &w in &work[u.0] {
            let (tier, a, b) = if levels.level_of(w) == level_idx {
                if w < u {
                    // Same-level edges show up from both endpoints; score
                    // each once, from its smaller endpoint.
                    continue;
                }
                (if em.contains_edge(u, w) { 1 } else { 2 }, u, w)
            } else {
                debug_assert_eq!(levels.level_of(w), level_idx + 1, "working edge skips a level");
                (if em.contains_edge(u, w) { 3 } else { 4 }, u, w)
            };
            if best.map_or(true, |cur| (tier, a, b) < cur) {
                best = Some((tier, a, b));
            }
        }
    }
    let (tier, a, b) = best.expect("a level with unvisited vertices must offer a working edge");
    (a, b, tier)
}

/// Vertex-first selection: smallest unvisited vertex of the level, then the
/// best (tier, partner) among its working edges.
fn select_vertex_first(
    work: &[BTreeSet<VertexId>],
    levels: &BfsLevels,
    level: &[VertexId],
    level_idx: usize,
    em: &Matching,
    visited: &[bool],
) -> (VertexId, VertexId, u8) {
    let u = level
        .iter()
        .copied()
        .find(|v| !visited[v.0])
        .expect("caller ensured an unvisited vertex exists");
    let mut best: Option<(u8, VertexId)> = None;
    for &w in &work[u.0] {
        let tier = if levels.level_of(w) == level_idx {
            debug_assert!(u < w, "unvisited same-level partner must be larger than the smallest unvisited vertex");
            if em.contains_edge(u, w) {
                1
            } else {
                2
            }
        } else {
            debug_assert_eq!(levels.level_of(w), level_idx + 1, "working edge skips a level");
            if em.contains_edge(u, w) {
                3
            } else {
                4
            }
        };
        if best.map_or(true, |cur| (tier, w) < cur) {
            best = Some((tier, w));
        }
    }
    let (tier, w) = best.expect("an unvisited vertex must have working edges");
    (u, w, tier)
}
