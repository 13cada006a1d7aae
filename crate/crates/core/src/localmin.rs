//! Local minimization of the guided matching's endpoint cover.
//!
//! The guided matching leaves every matched endpoint in the candidate cover.
//! Minimization walks the represents table three times and settles each
//! endpoint to frozen (kept in the cover) or removed (dropped):
//!
//! 1. top-down: an endpoint representing any unmatched vertex is necessary,
//!    because nothing else can cover the edge to that vertex; freeze it.
//! 2. top-down: if one endpoint of a fully active row represents only its
//!    partner, the partner still represents several vertices, and no other
//!    active endpoint represents the terminal one, the partner alone
//!    suffices; freeze the partner and remove the terminal endpoint.
//! 3. bottom-up: resolve what is left. A row whose partner was removed
//!    freezes its surviving endpoint. A fully active row must by now have
//!    both lists reduced to exactly the partner; whichever endpoint more
//!    active endpoints still represent is frozen and the other removed, with
//!    ties keeping the first endpoint.
//!
//! All transitions funnel through [`freeze_and_remove`], which also runs the
//! two cascades: removing a vertex freezes every active endpoint that still
//! represents it (cascade A, the removed vertex's edges need cover), and an
//! active endpoint whose list drains empty is removed (cascade B, nothing is
//! left for it to cover).

use thiserror::Error;

use crate::graph::VertexId;
use crate::represents::{EndpointStatus, RepresentsTable};
use crate::trace::{CascadeKind, TraceData, TraceEvent, TraceSink};

/// Why an endpoint changed status; serialized into trace events.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cause {
    /// Stage 1: the endpoint represents an unmatched vertex.
    Necessary,
    /// Stage 2: terminal endpoint folded into its partner.
    TerminalTopdown,
    /// Stage 3: partner was removed, survivor must cover the matched edge.
    RemainsVsRemoved,
    /// Stage 3: endpoint demanded by more active endpoints wins.
    CountCompare,
    /// Stage 3: demand tie, first endpoint kept.
    Tie,
    /// Cascade A: endpoint still represented a removed vertex.
    CascadeA,
    /// Cascade B: endpoint's list drained empty.
    CascadeB,
}

impl Cause {
    pub fn label(self) -> &'static str {
        match self {
            Cause::Necessary => "necessary",
            Cause::TerminalTopdown => "terminal-topdown",
            Cause::RemainsVsRemoved => "remains-vs-removed",
            Cause::CountCompare => "count-compare",
            Cause::Tie => "tie",
            Cause::CascadeA => "cascadeA",
            Cause::CascadeB => "cascadeB",
        }
    }
}

/// Internal-consistency violations detected during minimization.
///
/// None of these should be reachable; they exist so that a logic bug
/// surfaces as a structured diagnostic (which the differential harness
/// counts) instead of a panic deep inside a fuzz run.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LocalMinError {
    #[error("row {row}: endpoint {vertex} is active in the bottom-up stage but represents {list:?} instead of exactly its partner {partner}")]
    ActiveListNotPartner { row: usize, vertex: VertexId, partner: VertexId, list: Vec<VertexId> },
    #[error("row {row}: endpoint statuses ({status1}, {status2}) match no bottom-up rule")]
    UnexpectedRowState { row: usize, status1: &'static str, status2: &'static str },
    #[error("endpoints {remaining:?} still active after the bottom-up stage")]
    ActiveEndpointsRemain { remaining: Vec<VertexId> },
}

/// Applies one freeze and/or removal, then the cascades.
///
/// Order matters and is fixed: the removal is recorded first, then the
/// freeze (which also deletes the frozen vertex from every list), then
/// cascade A for the removed vertex, then cascade B for drained lists.
/// Cascades rescan the whole table in row order, first endpoint before
/// second, re-checking statuses at each visit; recursion terminates because
/// every call settles at least one active endpoint and no status ever
/// reverts.
///
/// Panics if both arguments are `None` or if either names an endpoint that
/// is not currently active.
pub fn freeze_and_remove(
    t: &mut RepresentsTable,
    freeze: Option<VertexId>,
    remove: Option<VertexId>,
    cause: Cause,
    sink: &mut dyn TraceSink,
) {
    assert!(freeze.is_some() || remove.is_some(), "nothing to freeze or remove");
    if let Some(r) = remove {
        assert_eq!(t.status_of(r), EndpointStatus::Active, "removing non-active endpoint {r}");
        t.set_status(r, EndpointStatus::Removed);
        t.clear_list(r);
        sink.emit(TraceEvent {
            seed: None,
            data: TraceData::Removed { vertex: r, row: t.row_of(r), cause },
        });
    }
    if let Some(f) = freeze {
        assert_eq!(t.status_of(f), EndpointStatus::Active, "freezing non-active endpoint {f}");
        t.set_status(f, EndpointStatus::Frozen);
        t.push_frozen(f);
        t.remove_from_all_lists(f);
        t.clear_list(f);
        sink.emit(TraceEvent {
            seed: None,
            data: TraceData::Frozen { vertex: f, row: t.row_of(f), cause },
        });
    }
    if let Some(r) = remove {
        // Cascade A: anything still representing the removed vertex is the
        // only remaining cover for their shared edge.
        for e in t.endpoints_in_table_order() {
            if t.status_of(e) == EndpointStatus::Active && t.list_of(e).contains(&r) {
                sink.emit(TraceEvent {
                    seed: None,
                    data: TraceData::Cascade { which: CascadeKind::A, endpoint: e, trigger: Some(r) },
                });
                freeze_and_remove(t, Some(e), None, Cause::CascadeA, sink);
            }
        }
    }
    // Cascade B: an empty list means every edge at that endpoint is already
    // covered by frozen vertices.
    for e in t.endpoints_in_table_order() {
        if t.status_of(e) == EndpointStatus::Active && t.list_of(e).is_empty() {
            sink.emit(TraceEvent {
                seed: None,
                data: TraceData::Cascade { which: CascadeKind::B, endpoint: e, trigger: None },
            });
            freeze_and_remove(t, None, Some(e), Cause::CascadeB, sink);
        }
    }
}

/// Runs the three minimization stages on a freshly built table and returns
/// the frozen vertices in freeze order; they form the candidate cover.
///
/// Panics if the table has already been partially minimized. Returns an
/// error only on internal-consistency violations (see [`LocalMinError`]).
pub fn local_minimization(
    t: &mut RepresentsTable,
    sink: &mut dyn TraceSink,
) -> Result<Vec<VertexId>, LocalMinError> {
    assert!(t.frozen_order().is_empty(), "table already minimized");
    assert!(
        t.endpoints_in_table_order().iter().all(|&v| t.status_of(v) == EndpointStatus::Active),
        "table already minimized"
    );

    // Stage 1: endpoints representing unmatched vertices are necessary.
    for v in t.endpoints_in_table_order() {
        if t.status_of(v) == EndpointStatus::Active
            && t.list_of(v).iter().any(|&x| !t.is_endpoint(x))
        {
            freeze_and_remove(t, Some(v), None, Cause::Necessary, sink);
        }
    }

    // Stage 2: fold terminal endpoints into their busier partners.
    for row in 0..t.rows().len() {
        let (n1, n2) = (t.rows()[row].node1(), t.rows()[row].node2());
        if t.status_of(n1) != EndpointStatus::Active || t.status_of(n2) != EndpointStatus::Active {
            continue;
        }
        for (u, v) in [(n1, n2), (n2, n1)] {
            if t.list_of(u) == [v] && t.list_of(v).len() > 1 && active_demand(t, u, v) == 0 {
                freeze_and_remove(t, Some(v), Some(u), Cause::TerminalTopdown, sink);
                break;
            }
        }
    }

    // Stage 3: resolve surviving rows bottom-up.
    for row in (0..t.rows().len()).rev() {
        let (n1, n2) = (t.rows()[row].node1(), t.rows()[row].node2());
        use EndpointStatus::{Active, Frozen, Removed};
        match (t.status_of(n1), t.status_of(n2)) {
            (Frozen, Frozen) | (Frozen, Removed) | (Removed, Frozen) => {}
            (Active, Removed) => {
                freeze_and_remove(t, Some(n1), None, Cause::RemainsVsRemoved, sink)
            }
            (Removed, Active) => {
                freeze_and_remove(t, Some(n2), None, Cause::RemainsVsRemoved, sink)
            }
            (Active, Active) => {
                for (u, v) in [(n1, n2), (n2, n1)] {
                    if t.list_of(u) != [v] {
                        return Err(LocalMinError::ActiveListNotPartner {
                            row,
                            vertex: u,
                            partner: v,
                            list: t.list_of(u).to_vec(),
                        });
                    }
                }
                let demand1 = active_demand(t, n1, n2);
                let demand2 = active_demand(t, n2, n1);
                if demand1 > demand2 {
                    freeze_and_remove(t, Some(n1), Some(n2), Cause::CountCompare, sink);
                } else if demand2 > demand1 {
                    freeze_and_remove(t, Some(n2), Some(n1), Cause::CountCompare, sink);
                } else {
                    freeze_and_remove(t, Some(n1), Some(n2), Cause::Tie, sink);
                }
            }
            (s1, s2) => {
                return Err(LocalMinError::UnexpectedRowState {
                    row,
                    status1: s1.label(),
                    status2: s2.label(),
                })
            }
        }
    }

    let remaining: Vec<VertexId> = t
        .endpoints_in_table_order()
        .into_iter()
        .filter(|&v| t.status_of(v) == EndpointStatus::Active)
        .collect();
    if !remaining.is_empty() {
        return Err(LocalMinError::ActiveEndpointsRemain { remaining });
    }
    Ok(t.frozen_order().to_vec())
}

/// Number of active endpoints, `exclude` aside, whose list contains `x`.
fn active_demand(t: &RepresentsTable, x: VertexId, exclude: VertexId) -> usize {
    let mut demand = 0;
    for r in t.rows() {
        for (node, status, list) in [
            (r.node1(), r.status1(), r.list1()),
            (r.node2(), r.status2(), r.list2()),
        ] {
            if status == EndpointStatus::Active && node != exclude && list.contains(&x) {
                demand += 1;
            }
        }
    }
    demand
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::matching::maximum_matching;
    use crate::represents::guided_maximal_matching;
    use crate::trace::NullSink;

    fn table_for(g: &Graph, seed: usize) -> RepresentsTable {
        let em = maximum_matching(g);
        let levels = g.bfs_levels(VertexId(seed));
        guided_maximal_matching(g, &em, &levels)
    }

    fn nine_vertex_graph() -> Graph {
        Graph::from_indexed_edges(
            9,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 7), (3, 5), (3, 8), (4, 6), (5, 6)],
        )
    }

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    #[test]
    fn nine_vertex_example_full_minimization() {
        let g = nine_vertex_graph();
        let mut t = table_for(&g, 0);
        let mut events: Vec<TraceEvent> = Vec::new();
        let cover = local_minimization(&mut t, &mut events).unwrap();
        assert_eq!(cover, ids(&[3, 1, 2, 6]), "freeze order");

        let frozen: Vec<(usize, &str)> = events
            .iter()
            .filter_map(|e| match &e.data {
                TraceData::Frozen { vertex, cause, .. } => Some((vertex.0, cause.label())),
                _ => None,
            })
            .collect();
        assert_eq!(
            frozen,
            vec![
                (3, "necessary"),
                (1, "terminal-topdown"),
                (2, "terminal-topdown"),
                (6, "count-compare"),
            ]
        );
        let removed: Vec<(usize, &str)> = events
            .iter()
            .filter_map(|e| match &e.data {
                TraceData::Removed { vertex, cause, .. } => Some((vertex.0, cause.label())),
                _ => None,
            })
            .collect();
        assert_eq!(
            removed,
            vec![
                (0, "terminal-topdown"),
                (7, "terminal-topdown"),
                (4, "count-compare"),
                (5, "cascadeB"),
            ]
        );
    }

    #[test]
    fn path_minimizes_to_inner_pair() {
        // 0-1-2-3: stage 2 folds 0 into 1, stage 3 ties on (2,3).
        let g = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let mut t = table_for(&g, 0);
        let cover = local_minimization(&mut t, &mut NullSink).unwrap();
        assert_eq!(cover, ids(&[1, 2]));
    }

    #[test]
    fn triangle_freezes_both_endpoints_as_necessary() {
        let g = Graph::from_indexed_edges(3, [(0, 1), (0, 2), (1, 2)]);
        let mut t = table_for(&g, 0);
        let mut events: Vec<TraceEvent> = Vec::new();
        let cover = local_minimization(&mut t, &mut events).unwrap();
        assert_eq!(cover, ids(&[0, 1]));
        assert!(events.iter().all(|e| match &e.data {
            TraceData::Frozen { cause, .. } => *cause == Cause::Necessary,
            _ => true,
        }));
    }

    #[test]
    fn single_edge_tie_keeps_first_endpoint() {
        let g = Graph::from_indexed_edges(2, [(0, 1)]);
        let mut t = table_for(&g, 0);
        let mut events: Vec<TraceEvent> = Vec::new();
        let cover = local_minimization(&mut t, &mut events).unwrap();
        assert_eq!(cover, ids(&[0]));
        assert!(events.iter().any(|e| matches!(
            &e.data,
            TraceData::Frozen { vertex, cause: Cause::Tie, .. } if vertex.0 == 0
        )));
    }

    #[test]
    fn star_keeps_only_the_center() {
        let g = Graph::from_indexed_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let mut t = table_for(&g, 0);
        let cover = local_minimization(&mut t, &mut NullSink).unwrap();
        assert_eq!(cover, ids(&[0]));
    }

    #[test]
    fn manual_freeze_and_remove_triggers_cascade_b() {
        // Drive the nine-vertex table by hand to the state before its last
        // row resolves, then apply the final freeze/remove and watch the
        // drained endpoint 5 fall to cascade B.
        let g = nine_vertex_graph();
        let mut t = table_for(&g, 0);
        let mut sink = NullSink;
        freeze_and_remove(&mut t, Some(VertexId(3)), None, Cause::Necessary, &mut sink);
        freeze_and_remove(
            &mut t,
            Some(VertexId(1)),
            Some(VertexId(0)),
            Cause::TerminalTopdown,
            &mut sink,
        );
        freeze_and_remove(
            &mut t,
            Some(VertexId(2)),
            Some(VertexId(7)),
            Cause::TerminalTopdown,
            &mut sink,
        );

        let mut events: Vec<TraceEvent> = Vec::new();
        freeze_and_remove(
            &mut t,
            Some(VertexId(6)),
            Some(VertexId(4)),
            Cause::CountCompare,
            &mut events,
        );
        assert_eq!(t.status_of(VertexId(6)), EndpointStatus::Frozen);
        assert_eq!(t.status_of(VertexId(4)), EndpointStatus::Removed);
        assert_eq!(t.status_of(VertexId(5)), EndpointStatus::Removed);
        assert!(events.iter().any(|e| matches!(
            &e.data,
            TraceData::Cascade { which: CascadeKind::B, endpoint, trigger: None } if endpoint.0 == 5
        )));
        assert_eq!(t.frozen_order(), ids(&[3, 1, 2, 6]).as_slice());
    }

    #[test]
    fn freeze_deletes_the_vertex_from_every_list() {
        let g = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let mut t = table_for(&g, 0);
        // 1 appears in 0's and 2's lists before, nowhere after.
        assert!(t.list_of(VertexId(0)).contains(&VertexId(1)));
        freeze_and_remove(&mut t, Some(VertexId(1)), None, Cause::Necessary, &mut NullSink);
        for v in [0usize, 2, 3] {
            assert!(!t.list_of(VertexId(v)).contains(&VertexId(1)));
        }
        assert!(t.list_of(VertexId(1)).is_empty());
    }

    #[test]
    #[should_panic(expected = "non-active")]
    fn refreezing_is_rejected() {
        let g = Graph::from_indexed_edges(2, [(0, 1)]);
        let mut t = table_for(&g, 0);
        freeze_and_remove(&mut t, Some(VertexId(0)), None, Cause::Necessary, &mut NullSink);
        freeze_and_remove(&mut t, Some(VertexId(0)), None, Cause::Necessary, &mut NullSink);
    }

    #[test]
    fn error_messages_are_descriptive() {
        let err = LocalMinError::ActiveListNotPartner {
            row: 2,
            vertex: VertexId(5),
            partner: VertexId(3),
            list: ids(&[3, 6]),
        };
        let text = err.to_string();
        assert!(text.contains("row 2") && text.contains("partner 3"), "{text}");
        let err = LocalMinError::UnexpectedRowState { row: 0, status1: "active", status2: "frozen" };
        assert!(err.to_string().contains("(active, frozen)"));
    }

    #[test]
    fn cause_labels_are_pinned() {
        let labels: Vec<&str> = [
            Cause::Necessary,
            Cause::TerminalTopdown,
            Cause::RemainsVsRemoved,
            Cause::CountCompare,
            Cause::Tie,
            Cause::CascadeA,
            Cause::CascadeB,
        ]
        .iter()
        .map(|c| c.label())
        .collect();
        assert_eq!(
            labels,
            vec![
                "necessary",
                "terminal-topdown",
                "remains-vs-removed",
                "count-compare",
                "tie",
                "cascadeA",
                "cascadeB",
            ]
        );
    }
}
