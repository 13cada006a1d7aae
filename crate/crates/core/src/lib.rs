//! Vertex cover toolkit built around a guided-maximal-matching heuristic.
//!
//! The pipeline computes a maximum matching (blossom algorithm), levels the
//! graph by BFS distance from a seed vertex, extracts a maximal matching that
//! respects the leveling, and then minimizes the induced cover by a
//! freeze/remove procedure over the matching's "represents" table. Exact
//! branch-and-bound and exhaustive oracles, reductions to and from a
//! committee-feasibility problem, and a differential fuzzing harness round
//! out the crate.

pub mod graph;
pub mod harness;
pub mod localmin;
pub mod matching;
pub mod oracle;
pub mod reductions;
pub mod represents;
pub mod solver;
pub mod trace;

pub use graph::{
    normalize, parse_graph, BfsLevels, Connectivity, Graph, GraphFormat, NormalizationEvent,
    ParseError, RawMultigraph, VertexId,
};
pub use localmin::{freeze_and_remove, local_minimization, Cause, LocalMinError};
pub use matching::{is_matching, maximum_matching, Matching};
pub use represents::{
    guided_maximal_matching, guided_maximal_matching_with, EndpointStatus, RepresentsRow,
    RepresentsTable, SelectionMode, Side,
};
pub use solver::{decide, solve, solve_with, trace_run, CoverResult, Decision, SolveConfig};
pub use trace::{NullSink, TraceEvent, TraceSink};
