//! Reductions between vertex cover and a committee-feasibility problem, and
//! the multigraph-to-simple-connected transform.
//!
//! The committee problem (diverse and representative committee feasibility):
//! given candidates, candidate groups, and populations with approval sets,
//! pick a committee of at most k candidates containing at least one member
//! of every non-empty group and at least one approved candidate of every
//! population with a non-empty approval set. Empty groups and approval sets
//! impose nothing and are ignored.
//!
//! A graph maps to such an instance by making each edge both a group and an
//! approval set over its two endpoint candidates; a committee then hits
//! every edge, i.e. is a vertex cover. The reverse direction maps size-2
//! sets to edges and size-1 sets to loops, which [`crate::normalize`]
//! resolves with dummy vertices. [`to_simple_connected`] additionally makes
//! any multigraph simple and connected while shifting the cover optimum by
//! exactly one, using a hub vertex adjacent to everything.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{normalize, Graph, RawMultigraph};

/// A committee-feasibility instance. Bounds are implicit: every non-empty
/// group and approval set demands at least one committee member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiReInstance {
    pub candidates: Vec<String>,
    pub groups: Vec<Vec<String>>,
    pub populations: Vec<Population>,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Population {
    pub approves: Vec<String>,
}

/// Largest candidate count [`dire_feasible_bruteforce`] accepts.
pub const DIRE_BRUTEFORCE_LIMIT: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DireError {
    #[error("candidate `{0}` appears more than once")]
    DuplicateCandidate(String),
    #[error("{context} references unknown candidate `{name}`")]
    UnknownCandidate { context: String, name: String },
    #[error("{context} has {size} members; the vertex cover correspondence supports at most 2")]
    SetTooLarge { context: String, size: usize },
    #[error("instance has {actual} candidates; brute force handles at most {limit}")]
    TooManyCandidates { actual: usize, limit: usize },
}

impl DiReInstance {
    pub fn from_json_str(text: &str) -> Result<DiReInstance, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance is always serializable")
    }

    /// Lower bound demanded of group `i`: one member if non-empty.
    pub fn diversity_bound(&self, i: usize) -> usize {
        usize::from(!self.groups[i].is_empty())
    }

    /// Lower bound demanded of population `i`: one approved candidate if its
    /// approval set is non-empty.
    pub fn representation_bound(&self, i: usize) -> usize {
        usize::from(!self.populations[i].approves.is_empty())
    }

    /// Checks candidate uniqueness and that groups and approvals only
    /// reference known candidates.
    pub fn validate(&self) -> Result<(), DireError> {
        self.candidate_index().map(|_| ())
    }

    fn candidate_index(&self) -> Result<BTreeMap<&str, usize>, DireError> {
        let mut index = BTreeMap::new();
        for (i, c) in self.candidates.iter().enumerate() {
            if index.insert(c.as_str(), i).is_some() {
                return Err(DireError::DuplicateCandidate(c.clone()));
            }
        }
        let check = |names: &[String], context: String| -> Result<(), DireError> {
            for n in names {
                if !index.contains_key(n.as_str()) {
                    return Err(DireError::UnknownCandidate { context, name: n.clone() });
                }
            }
            Ok(())
        };
        for (i, group) in self.groups.iter().enumerate() {
            check(group, format!("group {i}"))?;
        }
        for (i, population) in self.populations.iter().enumerate() {
            check(&population.approves, format!("population {i}"))?;
        }
        Ok(index)
    }
}

/// Maps a vertex cover question to committee feasibility: candidates are
/// vertices; every edge becomes both a two-member group and a population
/// approving its endpoints; the budget k carries over.
pub fn vc_to_dire(g: &Graph, k: usize) -> DiReInstance {
    let pair =
        |(u, v): &(_, _)| vec![g.name(*u).to_string(), g.name(*v).to_string()];
    DiReInstance {
        candidates: g.names().to_vec(),
        groups: g.edges().iter().map(pair).collect(),
        populations: g.edges().iter().map(|e| Population { approves: pair(e) }).collect(),
        k,
    }
}

/// Maps committee feasibility back to a vertex cover question. Size-2 sets
/// become edges, size-1 sets loops, empty sets nothing; the result may
/// contain loops and parallel edges and is meant to go through
/// [`normalize`]. The budget k carries over.
pub fn dire_to_vc(d: &DiReInstance) -> Result<(RawMultigraph, usize), DireError> {
    let index = d.candidate_index()?;
    let mut edges = Vec::new();
    let mut add = |set: &[String], context: String| -> Result<(), DireError> {
        match set {
            [] => Ok(()),
            [single] => {
                edges.push((index[single.as_str()], index[single.as_str()]));
                Ok(())
            }
            [a, b] => {
                edges.push((index[a.as_str()], index[b.as_str()]));
                Ok(())
            }
            _ => Err(DireError::SetTooLarge { context, size: set.len() }),
        }
    };
    for (i, group) in d.groups.iter().enumerate() {
        add(group, format!("group {i}"))?;
    }
    for (i, population) in d.populations.iter().enumerate() {
        add(&population.approves, format!("population {i}"))?;
    }
    Ok((RawMultigraph::new(d.candidates.clone(), edges), d.k))
}

/// Decision for a committee-feasibility instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DireDecision {
    /// A satisfying committee, smallest size first and lexicographically
    /// smallest in candidate order within that size.
    Feasible(Vec<String>),
    Infeasible,
}

impl DireDecision {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DireDecision::Feasible(_))
    }
}

/// Exhaustive committee search, exact for up to
/// [`DIRE_BRUTEFORCE_LIMIT`] candidates. Adding candidates to a satisfying
/// committee never violates the at-least-one bounds, so searching sizes in
/// ascending order finds a smallest satisfying committee first.
pub fn dire_feasible_bruteforce(d: &DiReInstance) -> Result<DireDecision, DireError> {
    let index = d.candidate_index()?;
    let n = d.candidates.len();
    if n > DIRE_BRUTEFORCE_LIMIT {
        return Err(DireError::TooManyCandidates { actual: n, limit: DIRE_BRUTEFORCE_LIMIT });
    }
    let mask_of = |names: &[String]| -> u32 {
        names.iter().fold(0u32, |acc, x| acc | (1 << index[x.as_str()]))
    };
    let mut constraints: Vec<u32> = Vec::new();
    constraints.extend(d.groups.iter().filter(|g| !g.is_empty()).map(|g| mask_of(g)));
    constraints.extend(
        d.populations
            .iter()
            .filter(|p| !p.approves.is_empty())
            .map(|p| mask_of(&p.approves)),
    );
    for size in 0..=d.k.min(n) {
        if let Some(committee) = first_hitting_combination(n, size, &constraints) {
            let names = committee.into_iter().map(|i| d.candidates[i].clone()).collect();
            return Ok(DireDecision::Feasible(names));
        }
    }
    Ok(DireDecision::Infeasible)
}

/// First combination of `size` indices out of `n`, in lexicographic order,
/// whose mask intersects every constraint.
fn first_hitting_combination(n: usize, size: usize, constraints: &[u32]) -> Option<Vec<usize>> {
    if size == 0 {
        return constraints.is_empty().then(Vec::new);
    }
    if size > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mask = idx.iter().fold(0u32, |acc, &i| acc | (1 << i));
        if constraints.iter().all(|&c| c & mask != 0) {
            return Some(idx);
        }
        // Advance to the next combination: bump the rightmost index that
        // still has room, then reset everything after it.
        let mut i = size;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - size + i {
                break;
            }
            if i == 0 {
                return None;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// What [`to_simple_connected`] changed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformEvent {
    CollapsedParallel { u: String, v: String, copies: usize },
    ReplacedLoop { vertex: String, dummy: String },
    /// A generated dummy or hub name was taken; the next ordinal was tried.
    NameCollision { attempted: String },
}

/// Output of [`to_simple_connected`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vc2Instance {
    /// Simple connected graph over original vertices, loop dummies, and hub.
    pub graph: Graph,
    pub original_vertices: Vec<String>,
    pub loop_dummies: Vec<String>,
    pub hub: String,
    /// Edges attaching the hub to every other vertex.
    pub hub_edges: Vec<(String, String)>,
    pub k_prime: usize,
}

/// Rewrites an arbitrary multigraph into a simple connected graph whose
/// minimum vertex cover is exactly one larger, pairing the question `k`
/// with `k + 1`.
///
/// Parallel edges collapse; each loop at `v` becomes a dummy vertex
/// `d__<v>_<ordinal>` plus an edge (covering the dummy edge costs one, as
/// the loop did); a hub `u__hub` is connected to every other vertex, forcing
/// one extra cover vertex while gluing the components together. Generated
/// names that collide with existing ones move to the next ordinal, reported
/// as events. The optimum shifts by exactly one for non-empty inputs; an
/// empty input yields just the isolated hub.
pub fn to_simple_connected(raw: &RawMultigraph, k: usize) -> (Vc2Instance, Vec<TransformEvent>) {
    let mut events = Vec::new();
    let mut names: Vec<String> = raw.names().to_vec();
    let mut taken: BTreeSet<String> = names.iter().cloned().collect();
    let mut pair_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut loop_ordinal: BTreeMap<usize, usize> = BTreeMap::new();
    let mut loop_dummies = Vec::new();

    for &(a, b) in raw.edges() {
        if a == b {
            let ordinal = loop_ordinal.entry(a).or_insert(0);
            let vertex = names[a].clone();
            let dummy = loop {
                let candidate = format!("d__{vertex}_{ordinal}");
                if taken.insert(candidate.clone()) {
                    break candidate;
                }
                events.push(TransformEvent::NameCollision { attempted: candidate });
                *ordinal += 1;
            };
            *ordinal += 1;
            let d = names.len();
            names.push(dummy.clone());
            loop_dummies.push(dummy.clone());
            events.push(TransformEvent::ReplacedLoop { vertex, dummy });
            pair_count.insert((a, d), 1);
        } else {
            *pair_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    for (&(a, b), &copies) in &pair_count {
        if copies > 1 {
            let (u, v) = if names[a] <= names[b] { (a, b) } else { (b, a) };
            events.push(TransformEvent::CollapsedParallel {
                u: names[u].clone(),
                v: names[v].clone(),
                copies,
            });
        }
    }

    let hub = {
        let mut ordinal: Option<usize> = None;
        loop {
            let candidate = match ordinal {
                None => "u__hub".to_string(),
                Some(i) => format!("u__hub_{i}"),
            };
            if taken.insert(candidate.clone()) {
                break candidate;
            }
            events.push(TransformEvent::NameCollision { attempted: candidate });
            ordinal = Some(ordinal.map_or(0, |i| i + 1));
        }
    };
    let hub_idx = names.len();
    names.push(hub.clone());
    let mut edges: Vec<(usize, usize)> = pair_count.keys().copied().collect();
    let mut hub_edges = Vec::new();
    for v in 0..hub_idx {
        edges.push((v, hub_idx));
        hub_edges.push((hub.clone(), names[v].clone()));
    }

    let (graph, normalize_events) = normalize(&RawMultigraph::new(names, edges));
    debug_assert!(normalize_events.is_empty(), "transform output should already be simple");
    let instance = Vc2Instance {
        graph,
        original_vertices: raw.names().to_vec(),
        loop_dummies,
        hub,
        hub_edges,
        k_prime: k + 1,
    };
    (instance, events)
}
