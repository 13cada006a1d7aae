//! Graph types, parsing, normalization, components, and BFS leveling.
//!
//! Two representations are used throughout the crate. [`RawMultigraph`] is
//! what parsers produce: vertices in first-appearance order and edges kept
//! verbatim, loops and parallel edges included. [`Graph`] is the
//! invariant-carrying form every algorithm works on: simple (no loops, no
//! parallel edges), undirected, with vertex names sorted so that ascending
//! [`VertexId`] order equals ascending byte-wise name order, and adjacency
//! lists sorted ascending. [`normalize`] converts the former to the latter
//! and reports everything it had to change.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Dense index of a vertex inside a [`Graph`].
///
/// Ids are assigned so that ascending id order equals ascending byte-wise
/// order of the vertex names ("10" sorts before "2"). All algorithmic
/// tie-breaking in this crate is defined in terms of this order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Simple undirected graph with named vertices.
///
/// Invariants, enforced by every constructor:
/// - `names` is sorted and duplicate-free; `VertexId(i)` refers to `names[i]`.
/// - Every edge is stored once as `(u, v)` with `u < v`; the edge list is
///   sorted. No loops.
/// - Adjacency lists are sorted ascending and symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    adjacency: Vec<Vec<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
}

/// Result of a connectivity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    /// Non-empty and connected.
    Ok,
    /// More than one connected component.
    Disconnected { components: usize },
    /// No vertices at all.
    Empty,
}

/// BFS distance classes from a seed vertex of a connected graph.
///
/// `levels()[0]` is exactly `[seed]`, each vertex appears in exactly one
/// level, vertices within a level are in ascending id order, and adjacent
/// vertices differ by at most one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsLevels {
    seed: VertexId,
    levels: Vec<Vec<VertexId>>,
    level_of: Vec<usize>,
}

impl BfsLevels {
    pub fn seed(&self) -> VertexId {
        self.seed
    }

    pub fn levels(&self) -> &[Vec<VertexId>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level_of(&self, v: VertexId) -> usize {
        self.level_of[v.0]
    }
}

impl Graph {
    /// Builds a graph over vertices `0..m` with auto-generated decimal names,
    /// zero-padded to a common width so that name order equals numeric order.
    ///
    /// Intended for generated instances and tests. Panics on loops, duplicate
    /// edges, or out-of-range endpoints; generators are expected to produce
    /// clean input.
    pub fn from_indexed_edges(m: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        let width = if m <= 1 { 1 } else { (m - 1).to_string().len() };
        let names: Vec<String> = (0..m).map(|i| format!("{i:0width$}")).collect();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            assert!(a < m && b < m, "edge ({a}, {b}) out of range for {m} vertices");
            assert_ne!(a, b, "loop at vertex {a} in simple-graph constructor");
            assert!(set.insert((a.min(b), a.max(b))), "duplicate edge ({a}, {b})");
        }
        Self::from_sorted_parts(names, set)
    }

    /// Core constructor: `names` already sorted and unique, `edge_set` given
    /// as index pairs `(a, b)` with `a < b`.
    fn from_sorted_parts(names: Vec<String>, edge_set: BTreeSet<(usize, usize)>) -> Graph {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]), "names must be sorted and unique");
        let mut adjacency = vec![Vec::new(); names.len()];
        let mut edges = Vec::with_capacity(edge_set.len());
        for &(a, b) in &edge_set {
            debug_assert!(a < b && b < names.len());
            // BTreeSet iteration order inserts each adjacency list in
            // ascending neighbor order, so no per-list sort is needed.
            adjacency[a].push(VertexId(b));
            adjacency[b].push(VertexId(a));
            edges.push((VertexId(a), VertexId(b)));
        }
        Graph { names, adjacency, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    /// Looks a vertex up by name.
    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(VertexId)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.adjacency[u.0].binary_search(&v).is_ok()
    }

    pub fn connectivity(&self) -> Connectivity {
        if self.names.is_empty() {
            return Connectivity::Empty;
        }
        match self.component_ids().1 {
            1 => Connectivity::Ok,
            n => Connectivity::Disconnected { components: n },
        }
    }

    /// Assigns each vertex a component number (numbered by smallest member
    /// id) and returns the assignment plus the component count.
    fn component_ids(&self) -> (Vec<usize>, usize) {
        let m = self.names.len();
        let mut comp = vec![usize::MAX; m];
        let mut count = 0;
        for start in 0..m {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = count;
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if comp[w.0] == usize::MAX {
                        comp[w.0] = count;
                        queue.push_back(w.0);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Splits the graph into its connected components, ordered by their
    /// smallest vertex id. Vertex names are preserved, so positions in the
    /// original graph can be recovered with [`Graph::vertex`].
    pub fn components(&self) -> Vec<Graph> {
        let (comp, count) = self.component_ids();
        let mut names: Vec<Vec<String>> = vec![Vec::new(); count];
        let mut local = vec![0usize; self.names.len()];
        for v in 0..self.names.len() {
            local[v] = names[comp[v]].len();
            names[comp[v]].push(self.names[v].clone());
        }
        let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); count];
        for &(u, v) in &self.edges {
            edge_sets[comp[u.0]].insert((local[u.0], local[v.0]));
        }
        names
            .into_iter()
            .zip(edge_sets)
            .map(|(n, e)| Graph::from_sorted_parts(n, e))
            .collect()
    }

    /// BFS distance classes from `seed`.
    ///
    /// Panics if the graph is not connected: the level structure is only
    /// meaningful (and only used) on connected graphs. Callers holding a
    /// disconnected graph should split it with [`Graph::components`] first.
    pub fn bfs_levels(&self, seed: VertexId) -> BfsLevels {
        assert!(seed.0 < self.names.len(), "seed {seed} out of range");
        let m = self.names.len();
        let mut level_of = vec![usize::MAX; m];
        let mut queue = VecDeque::from([seed]);
        level_of[seed.0] = 0;
        let mut max_level = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v.0] {
                if level_of[w.0] == usize::MAX {
                    level_of[w.0] = level_of[v.0] + 1;
                    max_level = max_level.max(level_of[w.0]);
                    queue.push_back(w);
                }
            }
        }
        assert!(
            level_of.iter().all(|&l| l != usize::MAX),
            "bfs_levels requires a connected graph"
        );
        let mut levels = vec![Vec::new(); max_level + 1];
        for v in 0..m {
            levels[level_of[v]].push(VertexId(v));
        }
        BfsLevels { seed, levels, level_of }
    }

    /// Serializes to edge-list text: one `u v` line per edge, then one bare
    /// line per isolated vertex. Parsing the output and normalizing it
    /// reproduces the graph.
    pub fn to_edgelist(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(self.name(u));
            out.push(' ');
            out.push_str(self.name(v));
            out.push('\n');
        }
        for v in 0..self.names.len() {
            if self.adjacency[v].is_empty() {
                out.push_str(&self.names[v]);
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vertices, {} edges", self.names.len(), self.edges.len())
    }
}

/// Multigraph exactly as parsed: names in first-appearance (or declaration)
/// order, edges verbatim with loops and parallel edges preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawMultigraph {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl RawMultigraph {
    /// Builds a raw multigraph from unique names and index edges.
    ///
    /// Panics on duplicate names or out-of-range endpoints; parsers and
    /// reductions construct their input so that neither can occur.
    pub fn new(names: Vec<String>, edges: Vec<(usize, usize)>) -> RawMultigraph {
        let unique: BTreeSet<&str> = names.iter().map(String::as_str).collect();
        assert_eq!(unique.len(), names.len(), "duplicate vertex names");
        for &(a, b) in &edges {
            assert!(a < names.len() && b < names.len(), "edge ({a}, {b}) out of range");
        }
        RawMultigraph { names, edges }
    }

    pub fn from_graph(g: &Graph) -> RawMultigraph {
        RawMultigraph {
            names: g.names().to_vec(),
            edges: g.edges().iter().map(|&(u, v)| (u.0, v.0)).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Edges verbatim, as indices into [`RawMultigraph::names`].
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Input formats accepted by [`parse_graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// Whitespace-separated lines: `u v` declares an edge, a single token
    /// declares an isolated vertex, `#` starts a comment.
    EdgeList,
    /// DIMACS: `c` comments, one `p edge <vertices> <edges>` header, `e u v`
    /// lines with 1-based endpoints. Vertices are named "1".."m".
    Dimacs,
}

/// Errors produced by [`parse_graph`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} outside declared range 1..={declared}")]
    VertexOutOfRange { line: usize, vertex: usize, declared: usize },
    #[error("missing `p edge <vertices> <edges>` header")]
    MissingHeader,
    #[error("line {line}: second `p` header")]
    DuplicateHeader { line: usize },
}

/// Parses graph text into a [`RawMultigraph`], preserving loops and parallel
/// edges verbatim. Run the result through [`normalize`] to obtain a
/// [`Graph`].
pub fn parse_graph(text: &str, format: GraphFormat) -> Result<RawMultigraph, ParseError> {
    match format {
        GraphFormat::EdgeList => parse_edgelist(text),
        GraphFormat::Dimacs => parse_dimacs(text),
    }
}

fn parse_edgelist(text: &str) -> Result<RawMultigraph, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut intern = |token: &str, names: &mut Vec<String>| -> usize {
        *index.entry(token.to_string()).or_insert_with(|| {
            names.push(token.to_string());
            names.len() - 1
        })
    };
    for (i, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [v] => {
                intern(v, &mut names);
            }
            [u, v] => {
                let a = intern(u, &mut names);
                let b = intern(v, &mut names);
                edges.push((a, b));
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: i + 1,
                    msg: format!("expected 1 or 2 tokens, found {}", tokens.len()),
                })
            }
        }
    }
    Ok(RawMultigraph { names, edges })
}

fn parse_dimacs(text: &str) -> Result<RawMultigraph, ParseError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw_line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [first, ..] if *first == "c" => {}
            [p, kind, m, _n] if *p == "p" => {
                if *kind != "edge" {
                    return Err(ParseError::Syntax {
                        line,
                        msg: format!("expected `p edge`, found `p {kind}`"),
                    });
                }
                if declared.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                let m: usize = m.parse().map_err(|_| ParseError::Syntax {
                    line,
                    msg: format!("invalid vertex count `{m}`"),
                })?;
                declared = Some(m);
            }
            [e, u, v] if *e == "e" => {
                let declared = declared.ok_or(ParseError::MissingHeader)?;
                let mut endpoint = |t: &str| -> Result<usize, ParseError> {
                    let x: usize = t.parse().map_err(|_| ParseError::Syntax {
                        line,
                        msg: format!("invalid vertex `{t}`"),
                    })?;
                    if x < 1 || x > declared {
                        return Err(ParseError::VertexOutOfRange { line, vertex: x, declared });
                    }
                    Ok(x - 1)
                };
                edges.push((endpoint(u)?, endpoint(v)?));
            }
            _ => {
                return Err(ParseError::Syntax {
                    line,
                    msg: format!("unrecognized line `{}`", raw_line.trim()),
                })
            }
        }
    }
    let m = declared.ok_or(ParseError::MissingHeader)?;
    let names = (1..=m).map(|i| i.to_string()).collect();
    Ok(RawMultigraph { names, edges })
}

/// One change made by [`normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizationEvent {
    /// `copies` parallel edges between `u` and `v` were collapsed to one.
    CollapsedParallel { u: String, v: String, copies: usize },
    /// A loop at `vertex` was replaced by fresh vertex `dummy` and an edge
    /// `vertex -- dummy`.
    ReplacedLoop { vertex: String, dummy: String },
    /// The next loop-dummy name for `vertex` was already taken; the ordinal
    /// was bumped and naming retried.
    DummyCollision { vertex: String, attempted: String },
}

impl fmt::Display for NormalizationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizationEvent::CollapsedParallel { u, v, copies } => {
                write!(f, "collapsed {copies} parallel edges {u} -- {v}")
            }
            NormalizationEvent::ReplacedLoop { vertex, dummy } => {
                write!(f, "replaced loop at {vertex} with dummy vertex {dummy}")
            }
            NormalizationEvent::DummyCollision { vertex, attempted } => {
                write!(f, "dummy name {attempted} for loop at {vertex} already taken")
            }
        }
    }
}

/// Converts a raw multigraph into a simple [`Graph`].
///
/// Parallel edges collapse to a single edge. Each loop at `v` is replaced by
/// a fresh dummy vertex `v__loopK` (`K` counting that vertex's loops from 0)
/// plus an edge from `v` to it, which preserves the vertex cover size: any
/// cover must pay one vertex for a loop, and the dummy edge costs exactly
/// one. Name clashes with existing vertices bump `K` until free. Every
/// change is reported in the returned event list.
pub fn normalize(raw: &RawMultigraph) -> (Graph, Vec<NormalizationEvent>) {
    let mut events = Vec::new();
    let mut names = raw.names.clone();
    let mut taken: BTreeSet<String> = names.iter().cloned().collect();
    let mut pair_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut loop_ordinal: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &raw.edges {
        if a == b {
            let k = loop_ordinal.entry(a).or_insert(0);
            let vertex = names[a].clone();
            let dummy = loop {
                let candidate = format!("{vertex}__loop{k}");
                if taken.insert(candidate.clone()) {
                    break candidate;
                }
                events.push(NormalizationEvent::DummyCollision {
                    vertex: vertex.clone(),
                    attempted: candidate,
                });
                *k += 1;
            };
            *k += 1;
            let d = names.len();
            names.push(dummy.clone());
            events.push(NormalizationEvent::ReplacedLoop { vertex, dummy });
            pair_count.insert((a, d), 1);
        } else {
            *pair_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    for (&(a, b), &copies) in &pair_count {
        if copies > 1 {
            let (u, v) = if names[a] <= names[b] { (a, b) } else { (b, a) };
            events.push(NormalizationEvent::CollapsedParallel {
                u: names[u].clone(),
                v: names[v].clone(),
                copies,
            });
        }
    }

    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&i, &j| names[i].cmp(&names[j]));
    let mut rank = vec![0usize; names.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let sorted_names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
    let edge_set: BTreeSet<(usize, usize)> = pair_count
        .keys()
        .map(|&(a, b)| (rank[a].min(rank[b]), rank[a].max(rank[b])))
        .collect();
    (Graph::from_sorted_parts(sorted_names, edge_set), events)
}
