//! The end-to-end cover search: matching, per-seed leveling and guided
//! matching, minimization, verification, and result selection.
//!
//! For a connected graph the driver computes one maximum matching, then for
//! every vertex in ascending order uses it as the BFS seed: level the graph,
//! extract the guided maximal matching, minimize its endpoint cover, verify
//! the result against the original edges, and keep the smallest verified
//! cover. The matching size is a lower bound on any cover, so a seed whose
//! cover matches it is provably optimal and the loop stops early.
//! Disconnected graphs are solved per component and the covers concatenated.
//! An unverified candidate is never returned: it is discarded and reported
//! as a diagnostic.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::graph::{Connectivity, Graph, VertexId};
use crate::localmin::{local_minimization, LocalMinError};
use crate::matching::{maximum_matching, maximum_matching_indices, Matching};
use crate::represents::{guided_maximal_matching_with, SelectionMode};
use crate::trace::{NullSink, Phase, RemapScope, SeedScope, TraceData, TraceEvent, TraceSink};

/// A vertex cover found by the solver or an oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverResult {
    /// Cover vertices in ascending id order.
    pub cover: Vec<VertexId>,
    pub size: usize,
    /// BFS seed that produced the cover. `None` for oracle results, empty
    /// graphs, and multi-component runs (each component had its own seed).
    pub seed: Option<VertexId>,
    /// Size of a maximum matching: no cover can be smaller.
    pub matching_lower_bound: usize,
    /// Whether the cover was re-checked against every edge.
    pub verified_cover: bool,
    /// True when `size == matching_lower_bound`, which certifies optimality.
    pub optimal_certified: bool,
}

impl CoverResult {
    pub fn cover_names(&self, g: &Graph) -> Vec<String> {
        self.cover.iter().map(|&v| g.name(v).to_string()).collect()
    }

    pub fn to_json(&self, g: &Graph) -> Value {
        json!({
            "size": self.size,
            "cover": self.cover_names(g),
            "seed": self.seed.map(|s| Value::String(g.name(s).to_string())).unwrap_or(Value::Null),
            "matching_lower_bound": self.matching_lower_bound,
            "verified_cover": self.verified_cover,
            "optimal_certified": self.optimal_certified,
        })
    }
}

/// Solver knobs. The default is the normative configuration: tier-first
/// selection, the deterministic matching, all seeds.
#[derive(Clone, Debug, Default)]
pub struct SolveConfig {
    pub selection: SelectionMode,
    /// When set, the maximum matching is computed on a pseudorandomly
    /// relabeled copy of the graph and mapped back, yielding a different
    /// (still maximum) matching. The harness uses this to probe how the
    /// pipeline depends on matching tie-breaks.
    pub matching_permutation_seed: Option<u64>,
    /// Restrict the seed loop to one BFS seed (used by `trace`).
    pub restrict_seed: Option<VertexId>,
}

/// Why a seed's candidate cover was discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedDiagnostic {
    /// The minimized set left an edge uncovered. Must never happen; kept as
    /// a diagnostic so the harness can prove it never does.
    InvalidCover {
        seed: VertexId,
        cover: Vec<VertexId>,
        uncovered_edge: (VertexId, VertexId),
    },
    /// Minimization detected an internal inconsistency.
    Internal { seed: VertexId, error: LocalMinError },
}

impl SeedDiagnostic {
    pub fn seed(&self) -> VertexId {
        match self {
            SeedDiagnostic::InvalidCover { seed, .. } => *seed,
            SeedDiagnostic::Internal { seed, .. } => *seed,
        }
    }
}

/// Everything a solver run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    /// Best verified cover, or `None` if every seed was discarded (which
    /// would indicate a bug; see `diagnostics`).
    pub result: Option<CoverResult>,
    pub diagnostics: Vec<SeedDiagnostic>,
    /// Total seeds attempted, summed over components.
    pub seeds_run: usize,
    /// Whether every component's seed loop stopped before exhausting its
    /// seeds (on a certified-optimal cover).
    pub early_exit: bool,
}

/// Decision-mode answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// A verified cover of size at most k, as witness.
    Yes(CoverResult),
    No,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }
}

/// Solves with the default configuration and no tracing.
///
/// Panics if no seed produced a verifiable cover, which would be an
/// implementation bug; use [`solve_with`] to observe diagnostics instead.
pub fn solve(g: &Graph) -> CoverResult {
    let outcome = solve_with(g, &SolveConfig::default(), &mut NullSink);
    match outcome.result {
        Some(result) => result,
        None => panic!("no seed produced a verified cover: {:?}", outcome.diagnostics),
    }
}

/// Full solver entry point: handles empty and disconnected graphs, emits
/// trace events into `sink`, and reports per-seed diagnostics.
pub fn solve_with(g: &Graph, config: &SolveConfig, sink: &mut dyn TraceSink) -> SolveOutcome {
    match g.connectivity() {
        Connectivity::Empty => {
            let result = CoverResult {
                cover: Vec::new(),
                size: 0,
                seed: None,
                matching_lower_bound: 0,
                verified_cover: true,
                optimal_certified: true,
            };
            emit_final(sink, &result, false);
            SolveOutcome { result: Some(result), diagnostics: Vec::new(), seeds_run: 0, early_exit: false }
        }
        Connectivity::Ok => {
            let em = matching_for(g, config);
            let bound = em.size();
            let run = run_connected(g, &em, config, sink, StopRule::CertifiedOptimal);
            let result = run.best.map(|(cover, seed)| CoverResult {
                size: cover.len(),
                optimal_certified: cover.len() == bound,
                cover,
                seed: Some(seed),
                matching_lower_bound: bound,
                verified_cover: true,
            });
            if let Some(r) = &result {
                emit_final(sink, r, run.early_exit);
            }
            SolveOutcome {
                result,
                diagnostics: run.diagnostics,
                seeds_run: run.seeds_run,
                early_exit: run.early_exit,
            }
        }
        Connectivity::Disconnected { .. } => solve_components(g, config, sink),
    }
}

fn solve_components(g: &Graph, config: &SolveConfig, sink: &mut dyn TraceSink) -> SolveOutcome {
    let mut cover: Vec<VertexId> = Vec::new();
    let mut bound = 0;
    let mut diagnostics = Vec::new();
    let mut seeds_run = 0;
    let mut early_exit = true;
    let mut complete = true;
    for comp in g.components() {
        // Names are preserved by the split, so they map component-local ids
        // back to ids in `g`.
        let map: Vec<VertexId> = comp
            .names()
            .iter()
            .map(|n| g.vertex(n).expect("component vertex missing from parent"))
            .collect();
        let comp_config = SolveConfig {
            selection: config.selection,
            matching_permutation_seed: config.matching_permutation_seed,
            restrict_seed: config
                .restrict_seed
                .and_then(|s| comp.vertex(g.name(s))),
        };
        let em = matching_for(&comp, &comp_config);
        bound += em.size();
        let mut scope = RemapScope { map: map.clone(), inner: sink };
        let run = run_connected(&comp, &em, &comp_config, &mut scope, StopRule::CertifiedOptimal);
        seeds_run += run.seeds_run;
        early_exit &= run.early_exit;
        diagnostics.extend(run.diagnostics.into_iter().map(|d| lift_diagnostic(d, &map)));
        match run.best {
            Some((comp_cover, _seed)) => cover.extend(comp_cover.into_iter().map(|v| map[v.0])),
            None => complete = false,
        }
    }
    cover.sort();
    let result = complete.then(|| CoverResult {
        size: cover.len(),
        optimal_certified: cover.len() == bound,
        cover,
        seed: None,
        matching_lower_bound: bound,
        verified_cover: true,
    });
    if let Some(r) = &result {
        emit_final(sink, r, early_exit);
    }
    SolveOutcome { result, diagnostics, seeds_run, early_exit }
}

/// Decides whether `g` has a vertex cover of size at most `k`.
pub fn decide(g: &Graph, k: usize) -> Decision {
    decide_with(g, k, &SolveConfig::default(), &mut NullSink).0
}

/// Decision mode with tracing and diagnostics.
///
/// Answers NO immediately when `k` undercuts the maximum-matching lower
/// bound. Otherwise, on a connected graph, the seed loop stops at the first
/// verified cover of size at most `k` and returns it as the YES witness;
/// disconnected graphs are fully solved and the combined size compared.
pub fn decide_with(
    g: &Graph,
    k: usize,
    config: &SolveConfig,
    sink: &mut dyn TraceSink,
) -> (Decision, Vec<SeedDiagnostic>) {
    if g.vertex_count() == 0 {
        let outcome = solve_with(g, config, sink);
        return (Decision::Yes(outcome.result.expect("empty graph always solves")), Vec::new());
    }
    let em = matching_for(g, config);
    if k < em.size() {
        // No cover can beat the matching bound, so no seed needs to run.
        return (Decision::No, Vec::new());
    }
    match g.connectivity() {
        Connectivity::Ok => {
            let bound = em.size();
            let run = run_connected(g, &em, config, sink, StopRule::SizeAtMost(k));
            let decision = match run.best {
                Some((cover, seed)) if cover.len() <= k => {
                    let result = CoverResult {
                        size: cover.len(),
                        optimal_certified: cover.len() == bound,
                        cover,
                        seed: Some(seed),
                        matching_lower_bound: bound,
                        verified_cover: true,
                    };
                    emit_final(sink, &result, run.early_exit);
                    Decision::Yes(result)
                }
                _ => Decision::No,
            };
            (decision, run.diagnostics)
        }
        _ => {
            let outcome = solve_with(g, config, sink);
            let decision = match outcome.result {
                Some(result) if result.size <= k => Decision::Yes(result),
                _ => Decision::No,
            };
            (decision, outcome.diagnostics)
        }
    }
}

/// Runs the full pipeline for one BFS seed and returns every trace event.
/// Equivalent to `solve_with` restricted to `seed` with a buffering sink.
pub fn trace_run(g: &Graph, seed: VertexId) -> Vec<TraceEvent> {
    let mut events: Vec<TraceEvent> = Vec::new();
    let config = SolveConfig { restrict_seed: Some(seed), ..SolveConfig::default() };
    solve_with(g, &config, &mut events);
    events
}

/// When the per-seed loop may stop.
#[derive(Clone, Copy)]
enum StopRule {
    /// Stop once a cover matches the matching lower bound.
    CertifiedOptimal,
    /// Stop at the first cover of size at most k (decision mode).
    SizeAtMost(usize),
}

impl StopRule {
    fn met(self, size: usize, bound: usize) -> bool {
        match self {
            StopRule::CertifiedOptimal => size == bound,
            StopRule::SizeAtMost(k) => size <= k,
        }
    }
}

struct ConnectedRun {
    /// Smallest verified cover (ascending ids) and the seed that found it.
    best: Option<(Vec<VertexId>, VertexId)>,
    diagnostics: Vec<SeedDiagnostic>,
    seeds_run: usize,
    early_exit: bool,
}

fn run_connected(
    g: &Graph,
    em: &Matching,
    config: &SolveConfig,
    sink: &mut dyn TraceSink,
    stop: StopRule,
) -> ConnectedRun {
    sink.emit(TraceEvent { seed: None, data: TraceData::PhaseStart { phase: Phase::Matching } });
    sink.emit(TraceEvent { seed: None, data: TraceData::MatchingDone { edges: em.edges() } });
    let bound = em.size();
    let seeds: Vec<VertexId> = match config.restrict_seed {
        Some(s) => vec![s],
        None => g.vertices().collect(),
    };
    let mut run = ConnectedRun {
        best: None,
        diagnostics: Vec::new(),
        seeds_run: 0,
        early_exit: false,
    };
    for seed in seeds {
        run.seeds_run += 1;
        let mut scope = SeedScope { seed, inner: sink };
        scope.emit(TraceEvent { seed: None, data: TraceData::PhaseStart { phase: Phase::Bfs } });
        let levels = g.bfs_levels(seed);
        scope.emit(TraceEvent {
            seed: None,
            data: TraceData::LevelsDone { levels: levels.levels().to_vec() },
        });
        scope.emit(TraceEvent {
            seed: None,
            data: TraceData::PhaseStart { phase: Phase::MaximalMatching },
        });
        let mut table = guided_maximal_matching_with(g, em, &levels, config.selection, &mut scope);
        scope.emit(TraceEvent {
            seed: None,
            data: TraceData::PhaseStart { phase: Phase::LocalMinimization },
        });
        match local_minimization(&mut table, &mut scope) {
            Err(error) => run.diagnostics.push(SeedDiagnostic::Internal { seed, error }),
            Ok(frozen) => {
                let mut cover = frozen;
                cover.sort();
                let uncovered = first_uncovered_edge(g, &cover);
                scope.emit(TraceEvent {
                    seed: None,
                    data: TraceData::SeedResult {
                        size: cover.len(),
                        cover: cover.clone(),
                        verified: uncovered.is_none(),
                    },
                });
                if let Some(edge) = uncovered {
                    run.diagnostics.push(SeedDiagnostic::InvalidCover {
                        seed,
                        cover,
                        uncovered_edge: edge,
                    });
                    continue;
                }
                let better = run.best.as_ref().map_or(true, |(b, _)| cover.len() < b.len());
                let size = cover.len();
                if better {
                    run.best = Some((cover, seed));
                }
                if stop.met(size, bound) {
                    run.early_exit = true;
                    break;
                }
            }
        }
    }
    run
}

fn emit_final(sink: &mut dyn TraceSink, result: &CoverResult, early_exit: bool) {
    sink.emit(TraceEvent {
        seed: result.seed,
        data: TraceData::Final {
            size: result.size,
            cover: result.cover.clone(),
            matching_lower_bound: result.matching_lower_bound,
            early_exit,
            optimal_certified: result.optimal_certified,
        },
    });
}

/// First edge not covered by the ascending `cover`, if any.
fn first_uncovered_edge(g: &Graph, cover: &[VertexId]) -> Option<(VertexId, VertexId)> {
    debug_assert!(cover.windows(2).all(|w| w[0] < w[1]));
    g.edges()
        .iter()
        .copied()
        .find(|&(u, v)| cover.binary_search(&u).is_err() && cover.binary_search(&v).is_err())
}

/// The deterministic maximum matching, or a relabeled variant of it when a
/// permutation seed is configured.
fn matching_for(g: &Graph, config: &SolveConfig) -> Matching {
    let Some(perm_seed) = config.matching_permutation_seed else {
        return maximum_matching(g);
    };
    let m = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut rng);
    let mut relabeled: Vec<Vec<usize>> = vec![Vec::new(); m];
    for v in g.vertices() {
        let mut nbrs: Vec<usize> = g.neighbors(v).iter().map(|w| perm[w.0]).collect();
        nbrs.sort_unstable();
        relabeled[perm[v.0]] = nbrs;
    }
    let relabeled_mate = maximum_matching_indices(&relabeled);
    let mut inverse = vec![0usize; m];
    for (v, &p) in perm.iter().enumerate() {
        inverse[p] = v;
    }
    let mate = (0..m)
        .map(|v| match relabeled_mate[perm[v]] {
            usize::MAX => usize::MAX,
            p => inverse[p],
        })
        .collect();
    Matching::from_mates(mate)
}

fn lift_diagnostic(d: SeedDiagnostic, map: &[VertexId]) -> SeedDiagnostic {
    let f = |v: VertexId| map[v.0];
    match d {
        SeedDiagnostic::InvalidCover { seed, cover, uncovered_edge: (u, v) } => {
            SeedDiagnostic::InvalidCover {
                seed: f(seed),
                cover: cover.into_iter().map(f).collect(),
                uncovered_edge: (f(u), f(v)),
            }
        }
        SeedDiagnostic::Internal { seed, error } => SeedDiagnostic::Internal {
            seed: f(seed),
            error: match error {
                LocalMinError::ActiveListNotPartner { row, vertex, partner, list } => {
                    LocalMinError::ActiveListNotPartner {
                        row,
                        vertex: f(vertex),
                        partner: f(partner),
                        list: list.into_iter().map(f).collect(),
                    }
                }
                LocalMinError::ActiveEndpointsRemain { remaining } => {
                    LocalMinError::ActiveEndpointsRemain {
                        remaining: remaining.into_iter().map(f).collect(),
                    }
                }
                other @ LocalMinError::UnexpectedRowState { .. } => other,
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{normalize, parse_graph, GraphFormat};

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    fn nine_vertex_graph() -> Graph {
        Graph::from_indexed_edges(
            9,
            [(0, 1), (1, 2), (1, 3), (2, 4), (2, 7), (3, 5), (3, 8), (4, 6), (5, 6)],
        )
    }

    #[test]
    fn nine_vertex_example_solves_optimally_with_early_exit() {
        let g = nine_vertex_graph();
        let outcome = solve_with(&g, &SolveConfig::default(), &mut NullSink);
        let r = outcome.result.unwrap();
        assert_eq!(r.cover, ids(&[1, 2, 3, 6]));
        assert_eq!(r.size, 4);
        assert_eq!(r.seed, Some(VertexId(0)));
        assert_eq!(r.matching_lower_bound, 4);
        assert!(r.verified_cover && r.optimal_certified);
        assert!(outcome.early_exit, "seed 0 already meets the matching bound");
        assert_eq!(outcome.seeds_run, 1);
        assert!(outcome.diagnostics.is_empty());
    }

    #[test]
    fn path_solves_to_two() {
        let g = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let r = solve(&g);
        assert_eq!(r.cover, ids(&[1, 2]));
        assert!(r.optimal_certified);
    }

    #[test]
    fn five_cycle_exceeds_its_matching_bound() {
        // C5: bound 2, optimum 3. No seed can certify, so all seeds run.
        let g = Graph::from_indexed_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let outcome = solve_with(&g, &SolveConfig::default(), &mut NullSink);
        let r = outcome.result.unwrap();
        assert_eq!(r.size, 3);
        assert_eq!(r.matching_lower_bound, 2);
        assert!(!r.optimal_certified);
        assert!(!outcome.early_exit);
        assert_eq!(outcome.seeds_run, 5);
    }

    #[test]
    fn empty_and_single_vertex_graphs() {
        let empty = Graph::from_indexed_edges(0, []);
        let r = solve(&empty);
        assert_eq!((r.size, r.cover.len(), r.seed), (0, 0, None));
        assert!(r.optimal_certified);

        let single = Graph::from_indexed_edges(1, []);
        let r = solve(&single);
        assert_eq!(r.size, 0);
        assert_eq!(r.seed, Some(VertexId(0)));
    }

    #[test]
    fn disconnected_graphs_solve_per_component() {
        let raw = parse_graph("a b\nc d\ne\n", GraphFormat::EdgeList).unwrap();
        let (g, _) = normalize(&raw);
        let outcome = solve_with(&g, &SolveConfig::default(), &mut NullSink);
        let r = outcome.result.unwrap();
        assert_eq!(r.size, 2);
        assert_eq!(r.cover_names(&g), vec!["a", "c"]);
        assert_eq!(r.seed, None);
        assert_eq!(r.matching_lower_bound, 2);
        assert!(r.optimal_certified);
    }

    #[test]
    fn decide_tracks_solve() {
        let g = nine_vertex_graph();
        assert!(matches!(decide(&g, 3), Decision::No), "below the matching bound");
        match decide(&g, 4) {
            Decision::Yes(r) => {
                assert_eq!(r.size, 4);
                assert_eq!(r.cover, ids(&[1, 2, 3, 6]));
            }
            Decision::No => panic!("expected YES at k=4"),
        }
        assert!(decide(&g, 9).is_yes());

        // C5 passes the bound check at k=2 but no seed reaches 2.
        let c5 = Graph::from_indexed_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert!(matches!(decide(&c5, 2), Decision::No));
        assert!(decide(&c5, 3).is_yes());

        let empty = Graph::from_indexed_edges(0, []);
        assert!(decide(&empty, 0).is_yes());
    }

    #[test]
    fn trace_run_is_deterministic_and_complete() {
        let g = nine_vertex_graph();
        let events = trace_run(&g, VertexId(0));
        let kinds: Vec<&str> = events.iter().map(TraceEvent::kind).collect();
        assert_eq!(kinds.first(), Some(&"phase_start"));
        assert!(kinds.contains(&"matching_done"));
        assert!(kinds.contains(&"levels_done"));
        assert!(kinds.contains(&"row_appended"));
        assert!(kinds.contains(&"frozen"));
        assert_eq!(kinds.last(), Some(&"final"));

        let again = trace_run(&g, VertexId(0));
        assert_eq!(events, again);
        let lines: Vec<String> = events.iter().map(|e| e.to_json(&g).to_string()).collect();
        let lines_again: Vec<String> = again.iter().map(|e| e.to_json(&g).to_string()).collect();
        assert_eq!(lines, lines_again, "serialized traces must be byte-identical");
    }

    #[test]
    fn trace_events_carry_their_seed() {
        let g = Graph::from_indexed_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let events = trace_run(&g, VertexId(2));
        for e in &events {
            match &e.data {
                TraceData::PhaseStart { phase: Phase::Matching } | TraceData::MatchingDone { .. } => {
                    assert_eq!(e.seed, None)
                }
                TraceData::LevelsDone { .. } | TraceData::RowAppended { .. } => {
                    assert_eq!(e.seed, Some(VertexId(2)))
                }
                _ => {}
            }
        }
    }

    #[test]
    fn permuted_matchings_stay_maximum() {
        let g = nine_vertex_graph();
        let baseline = maximum_matching(&g).size();
        for s in 0..20 {
            let config = SolveConfig { matching_permutation_seed: Some(s), ..Default::default() };
            let em = matching_for(&g, &config);
            assert!(crate::matching::is_matching(&g, &em.edges()));
            assert_eq!(em.size(), baseline, "permutation seed {s} broke maximality");
        }
        // At least one permutation should differ from the deterministic
        // matching, otherwise the probe mode probes nothing.
        let deterministic = maximum_matching(&g).edges();
        assert!((0..20).any(|s| {
            let config = SolveConfig { matching_permutation_seed: Some(s), ..Default::default() };
            matching_for(&g, &config).edges() != deterministic
        }));
    }

    #[test]
    fn vertex_first_mode_still_verifies() {
        let g = nine_vertex_graph();
        let config = SolveConfig { selection: SelectionMode::VertexFirst, ..Default::default() };
        let outcome = solve_with(&g, &config, &mut NullSink);
        let r = outcome.result.unwrap();
        assert!(r.verified_cover);
        assert!(r.size >= r.matching_lower_bound);
        assert!(outcome.diagnostics.is_empty());
    }

    #[test]
    fn cover_result_json_uses_names() {
        let g = nine_vertex_graph();
        let r = solve(&g);
        let v = r.to_json(&g);
        assert_eq!(v["size"], 4);
        assert_eq!(v["cover"][0], "1");
        assert_eq!(v["seed"], "0");
        assert_eq!(v["optimal_certified"], true);
    }
}
