//! Structured trace events emitted by the solver pipeline.
//!
//! Every stage reports what it did through a [`TraceSink`]; the solver
//! decides whether events go nowhere ([`NullSink`]), into a buffer
//! (`Vec<TraceEvent>`), or to a stream. Events carry no timestamps and are
//! serialized with vertex names rather than internal ids, so two runs on the
//! same input produce byte-identical trace output.

use serde_json::{json, Value};

use crate::graph::{Graph, VertexId};
use crate::localmin::Cause;

/// Pipeline phase markers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Matching,
    Bfs,
    MaximalMatching,
    LocalMinimization,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Matching => "matching",
            Phase::Bfs => "bfs",
            Phase::MaximalMatching => "maximal-matching",
            Phase::LocalMinimization => "local-minimization",
        }
    }
}

/// Which cascade of the freeze/remove procedure fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CascadeKind {
    /// An active endpoint still represented a removed vertex and was frozen.
    A,
    /// An active endpoint's list drained and it was removed.
    B,
}

/// One trace record: the BFS seed in whose run it occurred (absent for
/// seed-independent phases) plus the event payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub seed: Option<VertexId>,
    pub data: TraceData,
}

/// Event payloads, one variant per `kind`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceData {
    PhaseStart {
        phase: Phase,
    },
    MatchingDone {
        edges: Vec<(VertexId, VertexId)>,
    },
    LevelsDone {
        levels: Vec<Vec<VertexId>>,
    },
    EdgeSelected {
        a: VertexId,
        b: VertexId,
        tier: u8,
        level: usize,
    },
    RowAppended {
        row: usize,
        node1: VertexId,
        list1: Vec<VertexId>,
        node2: VertexId,
        list2: Vec<VertexId>,
    },
    Frozen {
        vertex: VertexId,
        row: usize,
        cause: Cause,
    },
    Removed {
        vertex: VertexId,
        row: usize,
        cause: Cause,
    },
    Cascade {
        which: CascadeKind,
        endpoint: VertexId,
        trigger: Option<VertexId>,
    },
    SeedResult {
        size: usize,
        cover: Vec<VertexId>,
        verified: bool,
    },
    Final {
        size: usize,
        cover: Vec<VertexId>,
        matching_lower_bound: usize,
        early_exit: bool,
        optimal_certified: bool,
    },
}

impl TraceEvent {
    pub fn kind(&self) -> &'static str {
        match &self.data {
            TraceData::PhaseStart { .. } => "phase_start",
            TraceData::MatchingDone { .. } => "matching_done",
            TraceData::LevelsDone { .. } => "levels_done",
            TraceData::EdgeSelected { .. } => "edge_selected",
            TraceData::RowAppended { .. } => "row_appended",
            TraceData::Frozen { .. } => "frozen",
            TraceData::Removed { .. } => "removed",
            TraceData::Cascade { .. } => "cascade",
            TraceData::SeedResult { .. } => "seed_result",
            TraceData::Final { .. } => "final",
        }
    }

    /// Serializes the event with vertex names resolved against `g`. Keys are
    /// emitted in a stable order, making trace output reproducible.
    pub fn to_json(&self, g: &Graph) -> Value {
        let name = |v: &VertexId| Value::String(g.name(*v).to_string());
        let names = |vs: &[VertexId]| Value::Array(vs.iter().map(name).collect());
        let pair = |&(u, v): &(VertexId, VertexId)| Value::Array(vec![name(&u), name(&v)]);
        let payload = match &self.data {
            TraceData::PhaseStart { phase } => json!({ "phase": phase.label() }),
            TraceData::MatchingDone { edges } => json!({
                "edges": edges.iter().map(pair).collect::<Vec<_>>(),
                "size": edges.len(),
            }),
            TraceData::LevelsDone { levels } => json!({
                "levels": levels.iter().map(|l| names(l)).collect::<Vec<_>>(),
            }),
            TraceData::EdgeSelected { a, b, tier, level } => json!({
                "a": name(a), "b": name(b), "tier": tier, "level": level,
            }),
            TraceData::RowAppended { row, node1, list1, node2, list2 } => json!({
                "row": row,
                "node1": name(node1), "list1": names(list1),
                "node2": name(node2), "list2": names(list2),
            }),
            TraceData::Frozen { vertex, row, cause } => json!({
                "vertex": name(vertex), "row": row, "cause": cause.label(),
            }),
            TraceData::Removed { vertex, row, cause } => json!({
                "vertex": name(vertex), "row": row, "cause": cause.label(),
            }),
            TraceData::Cascade { which, endpoint, trigger } => json!({
                "which": match which { CascadeKind::A => "A", CascadeKind::B => "B" },
                "endpoint": name(endpoint),
                "trigger": trigger.as_ref().map(name).unwrap_or(Value::Null),
            }),
            TraceData::SeedResult { size, cover, verified } => json!({
                "size": size, "cover": names(cover), "verified": verified,
            }),
            TraceData::Final { size, cover, matching_lower_bound, early_exit, optimal_certified } => json!({
                "size": size,
                "cover": names(cover),
                "matching_lower_bound": matching_lower_bound,
                "early_exit": early_exit,
                "optimal_certified": optimal_certified,
            }),
        };
        json!({
            "kind": self.kind(),
            "seed": self.seed.map(|s| Value::String(g.name(s).to_string())).unwrap_or(Value::Null),
            "payload": payload,
        })
    }

    /// Rewrites every vertex reference through `f`. Used when lifting events
    /// from a component's id space into the parent graph's.
    pub(crate) fn map_vertices(self, f: &dyn Fn(VertexId) -> VertexId) -> TraceEvent {
        let each = |vs: Vec<VertexId>| vs.into_iter().map(f).collect::<Vec<_>>();
        let data = match self.data {
            TraceData::PhaseStart { phase } => TraceData::PhaseStart { phase },
            TraceData::MatchingDone { edges } => TraceData::MatchingDone {
                edges: edges.into_iter().map(|(u, v)| (f(u), f(v))).collect(),
            },
            TraceData::LevelsDone { levels } => {
                TraceData::LevelsDone { levels: levels.into_iter().map(each).collect() }
            }
            TraceData::EdgeSelected { a, b, tier, level } => {
                TraceData::EdgeSelected { a: f(a), b: f(b), tier, level }
            }
            TraceData::RowAppended { row, node1, list1, node2, list2 } => TraceData::RowAppended {
                row,
                node1: f(node1),
                list1: each(list1),
                node2: f(node2),
                list2: each(list2),
            },
            TraceData::Frozen { vertex, row, cause } => {
                TraceData::Frozen { vertex: f(vertex), row, cause }
            }
            TraceData::Removed { vertex, row, cause } => {
                TraceData::Removed { vertex: f(vertex), row, cause }
            }
            TraceData::Cascade { which, endpoint, trigger } => TraceData::Cascade {
                which,
                endpoint: f(endpoint),
                trigger: trigger.map(f),
            },
            TraceData::SeedResult { size, cover, verified } => {
                TraceData::SeedResult { size, cover: each(cover), verified }
            }
            TraceData::Final { size, cover, matching_lower_bound, early_exit, optimal_certified } => {
                TraceData::Final {
                    size,
                    cover: each(cover),
                    matching_lower_bound,
                    early_exit,
                    optimal_certified,
                }
            }
        };
        TraceEvent { seed: self.seed.map(f), data }
    }
}

/// Receiver for pipeline events.
pub trait TraceSink {
    fn emit(&mut self, event: TraceEvent);
}

/// Discards every event; the default for untraced runs.
pub struct NullSink;

impl TraceSink for NullSink {
    fn emit(&mut self, _event: TraceEvent) {}
}

impl TraceSink for Vec<TraceEvent> {
    fn emit(&mut self, event: TraceEvent) {
        self.push(event);
    }
}

/// Stamps pass-through events with a BFS seed.
pub(crate) struct SeedScope<'a> {
    pub seed: VertexId,
    pub inner: &'a mut dyn TraceSink,
}

impl TraceSink for SeedScope<'_> {
    fn emit(&mut self, mut event: TraceEvent) {
        event.seed.get_or_insert(self.seed);
        self.inner.emit(event);
    }
}

/// Lifts component-local vertex ids into the parent graph's id space.
pub(crate) struct RemapScope<'a> {
    pub map: Vec<VertexId>,
    pub inner: &'a mut dyn TraceSink,
}

impl TraceSink for RemapScope<'_> {
    fn emit(&mut self, event: TraceEvent) {
        let map = &self.map;
        self.inner.emit(event.map_vertices(&|v| map[v.0]));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn json_uses_names_and_stable_keys() {
        let g = Graph::from_indexed_edges(12, [(0, 11), (10, 11)]);
        let event = TraceEvent {
            seed: Some(VertexId(0)),
            data: TraceData::EdgeSelected { a: VertexId(10), b: VertexId(11), tier: 4, level: 1 },
        };
        let v = event.to_json(&g);
        assert_eq!(v["kind"], "edge_selected");
        assert_eq!(v["seed"], "00");
        assert_eq!(v["payload"]["a"], "10");
        assert_eq!(v["payload"]["tier"], 4);
        // Serialization is stable across calls.
        assert_eq!(v.to_string(), event.to_json(&g).to_string());
    }

    #[test]
    fn null_seed_serializes_as_null() {
        let g = Graph::from_indexed_edges(2, [(0, 1)]);
        let event = TraceEvent {
            seed: None,
            data: TraceData::MatchingDone { edges: vec![(VertexId(0), VertexId(1))] },
        };
        let v = event.to_json(&g);
        assert!(v["seed"].is_null());
        assert_eq!(v["payload"]["size"], 1);
    }

    #[test]
    fn map_vertices_rewrites_every_field() {
        let event = TraceEvent {
            seed: Some(VertexId(0)),
            data: TraceData::RowAppended {
                row: 3,
                node1: VertexId(1),
                list1: vec![VertexId(0), VertexId(2)],
                node2: VertexId(2),
                list2: vec![VertexId(1)],
            },
        };
        let shifted = event.map_vertices(&|v| VertexId(v.0 + 10));
        assert_eq!(shifted.seed, Some(VertexId(10)));
        match shifted.data {
            TraceData::RowAppended { row, node1, list1, node2, list2 } => {
                assert_eq!(row, 3);
                assert_eq!(node1, VertexId(11));
                assert_eq!(list1, vec![VertexId(10), VertexId(12)]);
                assert_eq!(node2, VertexId(12));
                assert_eq!(list2, vec![VertexId(11)]);
            }
            other => panic!("unexpected payload {other:?}"),
        }
    }
}
