//! Graph representation, SNAP edge-list ingestion, probability models and
//! candidate-set extraction.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::BufRead;

use thiserror::Error;

use crate::delay::DelayPmf;
use crate::rng::{self, domain};
use crate::scalar::{scalar, Scalar};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: expected two integer node ids")]
    Malformed { line: usize },
    #[error("i/o error reading edge list: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("seed set must not be empty")]
    EmptySeedSet,
    #[error("duplicate seed {id}")]
    DuplicateSeed { id: u32 },
    #[error("node id {id} out of range for {node_count} nodes")]
    NodeOutOfRange { id: u32, node_count: usize },
    #[error("self-loop at node {u}")]
    SelfLoop { u: u32 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("edge ({u}, {v}) probability {p} outside (0, 1]")]
    ProbabilityOutOfRange { u: u32, v: u32, p: f64 },
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("trivalency value set must not be empty")]
    EmptyValueSet,
    #[error("trivalency value {p} outside (0, 1]")]
    ValueOutOfRange { p: f64 },
}

/// Parsed edge list: ids compacted to `0..n-1` in first-seen order,
/// self-loops and duplicate edges dropped (counted, not kept).
#[derive(Debug, Clone)]
pub struct EdgeList {
    node_count: usize,
    edges: Vec<(u32, u32)>,
    in_degree: Vec<u32>,
    dropped_self_loops: usize,
    dropped_duplicates: usize,
}

impl EdgeList {
    /// Reads `u <ws> v` lines; `#`-prefixed lines are comments.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, EdgeListError> {
        let mut ids: HashMap<u64, u32> = HashMap::new();
        let mut seen: HashSet<(u32, u32)> = HashSet::new();
        let mut edges = Vec::new();
        let mut dropped_self_loops = 0;
        let mut dropped_duplicates = 0;

        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut tokens = text.split_whitespace();
            let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(EdgeListError::Malformed { line: idx + 1 }),
            };
            let parse = |t: &str| -> Result<u64, EdgeListError> {
                t.parse()
                    .map_err(|_| EdgeListError::Malformed { line: idx + 1 })
            };
            let (raw_u, raw_v) = (parse(a)?, parse(b)?);
            let mut compact = |raw: u64| -> u32 {
                let next = ids.len() as u32;
                *ids.entry(raw).or_insert(next)
            };
            let u = compact(raw_u);
            let v = compact(raw_v);
            if u == v {
                dropped_self_loops += 1;
                continue;
            }
            if !seen.insert((u, v)) {
                dropped_duplicates += 1;
                continue;
            }
            edges.push((u, v));
        }

        let node_count = ids.len();
        let mut in_degree = vec![0u32; node_count];
        for &(_, v) in &edges {
            in_degree[v as usize] += 1;
        }
        Ok(Self {
            node_count,
            edges,
            in_degree,
            dropped_self_loops,
            dropped_duplicates,
        })
    }

    /// Same pipeline as [`EdgeList::parse`] over in-memory pairs
    /// (ids are compacted; self-loops and duplicates dropped).
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let text: String = pairs
            .into_iter()
            .map(|(u, v)| format!("{u}\t{v}\n"))
            .collect();
        Self::parse(text.as_bytes()).expect("numeric pairs always parse")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn in_degree(&self, v: u32) -> u32 {
        self.in_degree[v as usize]
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn dropped_duplicates(&self) -> usize {
        self.dropped_duplicates
    }

    /// Serializes back to the tab-separated text form; reparsing the output
    /// reproduces this edge list exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u}\t{v}\n"));
        }
        out
    }
}

/// Weighted-cascade probabilities: `p_uv = 1 / in_degree(v)`, in edge order.
pub fn weighted_cascade_probs<T: Scalar>(el: &EdgeList) -> Vec<T> {
    el.edges()
        .iter()
        .map(|&(_, v)| T::one() / scalar(el.in_degree(v) as f64))
        .collect()
}

/// Trivalency probabilities: each edge independently gets a uniform draw
/// from `values`; deterministic given `rng_seed`.
pub fn trivalency_probs<T: Scalar>(
    el: &EdgeList,
    values: &[T],
    rng_seed: u64,
) -> Result<Vec<T>, GraphError> {
    if values.is_empty() {
        return Err(GraphError::EmptyValueSet);
    }
    for &p in values {
        if p <= T::zero() || p > T::one() {
            return Err(GraphError::ValueOutOfRange {
                p: p.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut rng = rng::stream(rng_seed, domain::TRIVALENCY, 0);
    use rand::Rng;
    Ok(el
        .edges()
        .iter()
        .map(|_| values[rng.gen_range(0..values.len())])
        .collect())
}

/// Ordered set of distinct seed nodes, validated against a node count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    ids: Vec<u32>,
}

impl SeedSet {
    pub fn new(ids: Vec<u32>, node_count: usize) -> Result<Self, GraphError> {
        if ids.is_empty() {
            return Err(GraphError::EmptySeedSet);
        }
        let mut seen = HashSet::new();
        for &id in &ids {
            if id as usize >= node_count {
                return Err(GraphError::NodeOutOfRange { id, node_count });
            }
            if !seen.insert(id) {
                return Err(GraphError::DuplicateSeed { id });
            }
        }
        Ok(Self { ids })
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, id: u32) -> bool {
        self.ids.contains(&id)
    }
}

/// Out-edge of a [`DirectedGraph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub target: u32,
    pub prob: T,
}

/// Immutable directed graph with per-edge activation probabilities and
/// per-node activation-delay distributions.
#[derive(Debug, Clone)]
pub struct DirectedGraph<T> {
    out: Vec<Vec<Edge<T>>>,
    in_degree: Vec<u32>,
    delays: Vec<DelayPmf<T>>,
    edge_count: usize,
}

impl<T: Scalar> DirectedGraph<T> {
    fn build(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32, T)>,
        delays: Vec<DelayPmf<T>>,
        allow_latent: bool,
    ) -> Result<Self, GraphError> {
        if delays.len() != node_count {
            return Err(GraphError::LengthMismatch {
                what: "delay distributions",
                expected: node_count,
                got: delays.len(),
            });
        }
        let mut out: Vec<Vec<Edge<T>>> = vec![Vec::new(); node_count];
        let mut in_degree = vec![0u32; node_count];
        let mut seen = HashSet::new();
        let mut edge_count = 0;
        for (u, v, p) in edges {
            for id in [u, v] {
                if id as usize >= node_count {
                    return Err(GraphError::NodeOutOfRange { id, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { u });
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            let lower_ok = if allow_latent { p >= T::zero() } else { p > T::zero() };
            if !lower_ok || p > T::one() {
                return Err(GraphError::ProbabilityOutOfRange {
                    u,
                    v,
                    p: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            out[u as usize].push(Edge { target: v, prob: p });
            in_degree[v as usize] += 1;
            edge_count += 1;
        }
        Ok(Self {
            out,
            in_degree,
            delays,
            edge_count,
        })
    }

    /// Assembles a graph from a parsed edge list, per-edge probabilities in
    /// edge order, and per-node delay distributions.
    pub fn assemble(
        el: &EdgeList,
        probs: Vec<T>,
        delays: Vec<DelayPmf<T>>,
    ) -> Result<Self, GraphError> {
        if probs.len() != el.edge_count() {
            return Err(GraphError::LengthMismatch {
                what: "edge probabilities",
                expected: el.edge_count(),
                got: probs.len(),
            });
        }
        let edges = el
            .edges()
            .iter()
            .zip(probs)
            .map(|(&(u, v), p)| (u, v, p));
        Self::build(el.node_count(), edges, delays, false)
    }

    /// Direct constructor for explicitly weighted edges; probabilities must
    /// lie in `(0, 1]`.
    pub fn from_weighted_edges(
        node_count: usize,
        edges: &[(u32, u32, T)],
        delays: Vec<DelayPmf<T>>,
    ) -> Result<Self, GraphError> {
        Self::build(node_count, edges.iter().copied(), delays, false)
    }

    /// Like [`DirectedGraph::from_weighted_edges`] but permits latent
    /// zero-probability edges that only materialize when their source node is
    /// boosted. Assignment paths never produce these; they exist for
    /// constructions where boosting creates the connection.
    pub fn from_weighted_edges_with_latent(
        node_count: usize,
        edges: &[(u32, u32, T)],
        delays: Vec<DelayPmf<T>>,
    ) -> Result<Self, GraphError> {
        Self::build(node_count, edges.iter().copied(), delays, true)
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn out_edges(&self, u: u32) -> &[Edge<T>] {
        &self.out[u as usize]
    }

    pub fn out_degree(&self, u: u32) -> u32 {
        self.out[u as usize].len() as u32
    }

    pub fn in_degree(&self, v: u32) -> u32 {
        self.in_degree[v as usize]
    }

    #[inline]
    pub fn delay(&self, u: u32) -> &DelayPmf<T> {
        &self.delays[u as usize]
    }

    /// Candidate set `V^c`: nodes within hop-distance `horizon` of the seeds
    /// (seeds included), sorted ascending.
    pub fn candidate_set(&self, seeds: &SeedSet, horizon: usize) -> Vec<u32> {
        let mut depth = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        for &s in seeds.ids() {
            depth[s as usize] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let d = depth[u as usize];
            if d as usize >= horizon {
                continue;
            }
            for e in self.out_edges(u) {
                if depth[e.target as usize] == u32::MAX {
                    depth[e.target as usize] = d + 1;
                    queue.push_back(e.target);
                }
            }
        }
        let mut nodes: Vec<u32> = (0..self.node_count() as u32)
            .filter(|&v| depth[v as usize] != u32::MAX)
            .collect();
        nodes.sort_unstable();
        nodes
    }

    /// Adds a virtual seed `s^v` with probability-1, zero-delay edges to all
    /// seeds. Returns the augmented graph and the virtual node's id.
    pub fn augment_virtual_seed(&self, seeds: &SeedSet) -> (Self, u32) {
        let sv = self.node_count() as u32;
        let mut out = self.out.clone();
        out.push(
            seeds
                .ids()
                .iter()
                .map(|&s| Edge {
                    target: s,
                    prob: T::one(),
                })
                .collect(),
        );
        let mut in_degree = self.in_degree.clone();
        in_degree.push(0);
        for &s in seeds.ids() {
            in_degree[s as usize] += 1;
        }
        let mut delays = self.delays.clone();
        delays.push(DelayPmf::instant());
        (
            Self {
                out,
                in_degree,
                delays,
                edge_count: self.edge_count + seeds.len(),
            },
            sv,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_delays(n: usize) -> Vec<DelayPmf<f64>> {
        vec![DelayPmf::deterministic(1); n]
    }

    #[test]
    fn parse_basic() {
        let el = EdgeList::parse("0\t1\n1\t2".as_bytes()).unwrap();
        assert_eq!(el.node_count(), 3);
        assert_eq!(el.edge_count(), 2);
        assert_eq!(el.dropped_self_loops() + el.dropped_duplicates(), 0);
    }

    #[test]
    fn parse_drops_self_loops_and_duplicates() {
        let el = EdgeList::parse("0\t0\n0\t1\n0\t1".as_bytes()).unwrap();
        assert_eq!(el.node_count(), 2);
        assert_eq!(el.edge_count(), 1);
        assert_eq!(el.dropped_self_loops(), 1);
        assert_eq!(el.dropped_duplicates(), 1);
    }

    #[test]
    fn parse_accepts_comments_and_whitespace() {
        let el = EdgeList::parse("# header\n\n10 20\n20\t30\n".as_bytes()).unwrap();
        assert_eq!(el.node_count(), 3);
        assert_eq!(el.edge_count(), 2);
        // first-seen compaction
        assert_eq!(el.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn parse_rejects_malformed_lines() {
        let err = EdgeList::parse("0\t1\nfoo\tbar".as_bytes()).unwrap_err();
        assert!(matches!(err, EdgeListError::Malformed { line: 2 }));
        let err = EdgeList::parse("0 1 2".as_bytes()).unwrap_err();
        assert!(matches!(err, EdgeListError::Malformed { line: 1 }));
    }

    #[test]
    fn serialization_round_trips() {
        let el = EdgeList::parse("5 7\n7 5\n5 9\n9 7\n".as_bytes()).unwrap();
        let back = EdgeList::parse(el.to_text().as_bytes()).unwrap();
        assert_eq!(el.edges(), back.edges());
        assert_eq!(el.node_count(), back.node_count());
    }

    #[test]
    fn weighted_cascade_is_inverse_in_degree() {
        // star with ten edges into the center
        let pairs: Vec<(u64, u64)> = (1..=10).map(|u| (u, 0)).collect();
        let el = EdgeList::from_pairs(pairs);
        let probs = weighted_cascade_probs::<f64>(&el);
        assert!(probs.iter().all(|&p| (p - 0.1).abs() < 1e-15));

        let el = EdgeList::from_pairs([(0, 1), (2, 1), (3, 1), (4, 1), (0, 2)]);
        let probs = weighted_cascade_probs::<f64>(&el);
        for (i, &(_, v)) in el.edges().iter().enumerate() {
            let expected = 1.0 / el.in_degree(v) as f64;
            assert_eq!(probs[i], expected);
        }
        // in-degree 1 target gets probability exactly 1
        assert_eq!(probs[4], 1.0);
    }

    #[test]
    fn trivalency_is_deterministic_and_within_set() {
        let el = EdgeList::from_pairs((0..50u64).map(|i| (i, i + 1)));
        let vals = [0.1, 0.01, 0.001];
        let a = trivalency_probs::<f64>(&el, &vals, 9).unwrap();
        let b = trivalency_probs::<f64>(&el, &vals, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| vals.contains(p)));
        let c = trivalency_probs::<f64>(&el, &[0.5], 9).unwrap();
        assert!(c.iter().all(|&p| p == 0.5));
        assert!(trivalency_probs::<f64>(&el, &[], 9).is_err());
    }

    #[test]
    fn candidate_set_bfs_depth() {
        // chain s -> a -> b -> c
        let g = DirectedGraph::from_weighted_edges(
            4,
            &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)],
            unit_delays(4),
        )
        .unwrap();
        let seeds = SeedSet::new(vec![0], 4).unwrap();
        assert_eq!(g.candidate_set(&seeds, 2), vec![0, 1, 2]);
        assert_eq!(g.candidate_set(&seeds, 0), vec![0]);
    }

    #[test]
    fn candidate_set_excludes_disconnected() {
        let g = DirectedGraph::from_weighted_edges(3, &[(0, 1, 0.5)], unit_delays(3)).unwrap();
        let seeds = SeedSet::new(vec![0], 3).unwrap();
        assert_eq!(g.candidate_set(&seeds, 10), vec![0, 1]);
    }

    #[test]
    fn virtual_seed_augmentation() {
        let g = DirectedGraph::from_weighted_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)], unit_delays(3))
            .unwrap();
        let seeds = SeedSet::new(vec![0, 2], 3).unwrap();
        let (aug, sv) = g.augment_virtual_seed(&seeds);
        assert_eq!(sv, 3);
        assert_eq!(aug.node_count(), 4);
        assert_eq!(aug.edge_count(), g.edge_count() + 2);
        assert!(aug.out_edges(sv).iter().all(|e| e.prob == 1.0));
        assert!(aug.delay(sv).is_instant());
        assert_eq!(aug.in_degree(0), g.in_degree(0) + 1);
        // base untouched
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(
            DirectedGraph::from_weighted_edges(2, &[(0, 0, 0.5)], unit_delays(2)),
            Err(GraphError::SelfLoop { u: 0 })
        ));
        assert!(matches!(
            DirectedGraph::from_weighted_edges(2, &[(0, 1, 0.0)], unit_delays(2)),
            Err(GraphError::ProbabilityOutOfRange { .. })
        ));
        assert!(DirectedGraph::from_weighted_edges_with_latent(
            2,
            &[(0, 1, 0.0)],
            unit_delays(2)
        )
        .is_ok());
        assert!(matches!(
            SeedSet::new(vec![0, 0], 3),
            Err(GraphError::DuplicateSeed { id: 0 })
        ));
        assert!(matches!(
            SeedSet::new(vec![], 3),
            Err(GraphError::EmptySeedSet)
        ));
    }
}
