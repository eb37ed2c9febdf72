//! Stochastic diffusion engine, Monte Carlo spread estimation, and an exact
//! enumeration oracle for tiny instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::boost::BoostedGraphView;
use crate::graph::SeedSet;
use crate::rng::{self, domain};
use crate::scalar::{scalar, Scalar};

/// Exact enumeration refuses instances whose joint outcome space exceeds
/// this many worlds.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("exact enumeration needs {worlds} worlds, over the limit of {limit}")]
    EnumerationTooLarge { worlds: u128, limit: u128 },
    #[error("at least one simulation run is required")]
    NoRuns,
}

/// Horizon, run count and master seed for a spread estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffusionConfig {
    pub horizon: usize,
    pub runs: usize,
    pub rng_seed: u64,
}

impl DiffusionConfig {
    pub fn new(horizon: usize, runs: usize, rng_seed: u64) -> Result<Self, SimError> {
        if runs == 0 {
            return Err(SimError::NoRuns);
        }
        Ok(Self {
            horizon,
            runs,
            rng_seed,
        })
    }
}

/// Result of a single cascade: per-node activation times within the horizon.
#[derive(Debug, Clone)]
pub struct ActivationOutcome {
    pub activation_time: Vec<Option<u32>>,
    pub activated_count: usize,
}

/// Extended per-run record used by the distance and last-node selectors.
#[derive(Debug, Clone)]
pub struct CascadeTrace<T> {
    pub activation_time: Vec<Option<u32>>,
    /// Realized activator: the in-neighbor whose landing achieved the node's
    /// activation time (first one encountered on ties).
    pub parent: Vec<Option<u32>>,
    /// Hop depth along the realized activation path; 0 for seeds.
    pub hops: Vec<u32>,
    /// Product of effective edge probabilities along the realized path;
    /// 1 for seeds.
    pub path_prob: Vec<T>,
    /// Whether the node's own landings activated at least one new node.
    pub spawned: Vec<bool>,
    pub activated_count: usize,
}

/// Monte Carlo or exact expected number of activated nodes by the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub runs: usize,
    pub exact: bool,
}

const UNREACHED: u32 = u32::MAX;

struct Workspace {
    dist: Vec<u32>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHED; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = UNREACHED;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

struct TraceBuf<T> {
    parent: Vec<u32>,
    hops: Vec<u32>,
    path_prob: Vec<T>,
    landings: Vec<(u32, u32, u32)>,
}

/// One cascade with event-driven earliest-arrival semantics. Every out-edge
/// of an activated node gets exactly one Bernoulli success draw and, on
/// success, one delay draw from the activator's (boosted) distribution; a
/// node's activation time is the minimum landing over its in-edges, counted
/// only if it is at most `horizon`. Overflow delay draws never land.
fn run_cascade<T: Scalar, R: Rng + ?Sized>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    horizon: usize,
    rng: &mut R,
    ws: &mut Workspace,
    mut trace: Option<&mut TraceBuf<T>>,
) -> usize {
    ws.reset();
    let horizon = horizon as u64;
    for &s in seeds.ids() {
        ws.dist[s as usize] = 0;
        ws.touched.push(s);
        ws.heap.push(Reverse((0, s)));
        if let Some(tb) = trace.as_deref_mut() {
            tb.parent[s as usize] = UNREACHED;
            tb.hops[s as usize] = 0;
            tb.path_prob[s as usize] = T::one();
        }
    }
    let mut count = 0usize;
    while let Some(Reverse((t, u))) = ws.heap.pop() {
        if t != ws.dist[u as usize] {
            continue; // stale entry; the node settled earlier
        }
        count += 1;
        for edge in view.graph().out_edges(u) {
            let p = view.edge_prob(u, edge.prob);
            let success = rng.gen::<f64>() < p.to_f64().unwrap_or(0.0);
            if !success {
                continue;
            }
            let Some(delta) = view.delay(u).sample(rng) else {
                continue; // overflow: never lands
            };
            let arrival64 = t as u64 + delta as u64;
            if arrival64 > horizon {
                continue;
            }
            let arrival = arrival64 as u32;
            let v = edge.target as usize;
            if let Some(tb) = trace.as_deref_mut() {
                tb.landings.push((u, edge.target, arrival));
            }
            if arrival < ws.dist[v] {
                if ws.dist[v] == UNREACHED {
                    ws.touched.push(edge.target);
                }
                ws.dist[v] = arrival;
                ws.heap.push(Reverse((arrival, edge.target)));
                if let Some(tb) = trace.as_deref_mut() {
                    tb.parent[v] = u;
                    tb.hops[v] = tb.hops[u as usize] + 1;
                    tb.path_prob[v] = tb.path_prob[u as usize] * p;
                }
            }
        }
    }
    count
}

/// Runs one cascade; deterministic given the RNG state.
pub fn simulate_once<T: Scalar, R: Rng + ?Sized>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    horizon: usize,
    rng: &mut R,
) -> ActivationOutcome {
    let n = view.node_count();
    let mut ws = Workspace::new(n);
    let activated_count = run_cascade(view, seeds, horizon, rng, &mut ws, None);
    let activation_time = ws
        .dist
        .iter()
        .map(|&d| (d != UNREACHED).then_some(d))
        .collect();
    ActivationOutcome {
        activation_time,
        activated_count,
    }
}

/// Like [`simulate_once`] but records realized parents, hop depths, path
/// probabilities and terminal information.
pub fn simulate_cascade<T: Scalar, R: Rng + ?Sized>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    horizon: usize,
    rng: &mut R,
) -> CascadeTrace<T> {
    let n = view.node_count();
    let mut ws = Workspace::new(n);
    let mut tb = TraceBuf {
        parent: vec![UNREACHED; n],
        hops: vec![0; n],
        path_prob: vec![T::zero(); n],
        landings: Vec::new(),
    };
    let activated_count = run_cascade(view, seeds, horizon, rng, &mut ws, Some(&mut tb));
    let mut spawned = vec![false; n];
    for &(u, v, arrival) in &tb.landings {
        // order-free: u activated v iff its landing ties v's final time
        if ws.dist[v as usize] == arrival {
            spawned[u as usize] = true;
        }
    }
    CascadeTrace {
        activation_time: ws
            .dist
            .iter()
            .map(|&d| (d != UNREACHED).then_some(d))
            .collect(),
        parent: tb
            .parent
            .iter()
            .map(|&p| (p != UNREACHED).then_some(p))
            .collect(),
        hops: tb.hops,
        path_prob: tb.path_prob,
        spawned,
        activated_count,
    }
}

/// Monte Carlo estimate of the boosted spread over `runs` independent
/// cascades. Run `i` draws from the derived stream `(rng_seed, i)`, so the
/// result is bit-identical regardless of worker count.
pub fn estimate_spread<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    horizon: usize,
    runs: usize,
    rng_seed: u64,
) -> SpreadEstimate<T> {
    assert!(runs >= 1, "estimate_spread needs at least one run");
    let n = view.node_count();
    let (sum, sum_sq) = (0..runs)
        .into_par_iter()
        .map_init(
            || Workspace::new(n),
            |ws, i| {
                let mut rng = rng::stream(rng_seed, domain::SIM_RUN, i as u64);
                run_cascade(view, seeds, horizon, &mut rng, ws, None) as u64
            },
        )
        .map(|c| (c, (c as u128) * (c as u128)))
        .reduce(|| (0u64, 0u128), |a, b| (a.0 + b.0, a.1 + b.1));
    summarize(sum, sum_sq, runs)
}

/// [`estimate_spread`] driven by a [`DiffusionConfig`].
pub fn estimate_spread_with<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    cfg: &DiffusionConfig,
) -> SpreadEstimate<T> {
    estimate_spread(view, seeds, cfg.horizon, cfg.runs, cfg.rng_seed)
}

fn summarize<T: Scalar>(sum: u64, sum_sq: u128, runs: usize) -> SpreadEstimate<T> {
    let r = runs as f64;
    let mean = sum as f64 / r;
    let std_error = if runs > 1 {
        let var = ((sum_sq as f64) - (sum as f64) * (sum as f64) / r) / (r - 1.0);
        (var.max(0.0) / r).sqrt()
    } else {
        0.0
    };
    SpreadEstimate {
        mean: scalar(mean),
        std_error: scalar(std_error),
        runs,
        exact: false,
    }
}

struct EdgeWorld<T> {
    source: u32,
    target: u32,
    /// `(landing delay, probability)`; `None` covers both a failed Bernoulli
    /// draw and an overflow delay, neither of which ever lands.
    outcomes: Vec<(Option<u32>, T)>,
}

/// Exact boosted spread by enumerating every joint edge-success and
/// delay-value assignment, with earliest-arrival semantics identical to
/// [`simulate_once`]. Refuses instances over [`ENUMERATION_LIMIT`] worlds.
pub fn exact_spread<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    seeds: &SeedSet,
    horizon: usize,
) -> Result<SpreadEstimate<T>, SimError> {
    let n = view.node_count();
    let mut edges: Vec<EdgeWorld<T>> = Vec::new();
    for u in 0..n as u32 {
        for edge in view.graph().out_edges(u) {
            let p = view.edge_prob(u, edge.prob);
            if p <= T::zero() {
                continue; // a latent edge never fires; factor one
            }
            let pmf = view.delay(u);
            let mut outcomes = Vec::with_capacity(pmf.support_len() + 1);
            let miss = T::one() - p + p * pmf.overflow();
            if miss > T::zero() {
                outcomes.push((None, miss));
            }
            for (t, m) in pmf.support() {
                if t <= horizon {
                    outcomes.push((Some(t as u32), p * m));
                } else {
                    // lands beyond any queryable time; fold into the miss
                    match outcomes.iter_mut().find(|(o, _)| o.is_none()) {
                        Some((_, q)) => *q = *q + p * m,
                        None => outcomes.push((None, p * m)),
                    }
                }
            }
            edges.push(EdgeWorld {
                source: u,
                target: edge.target,
                outcomes,
            });
        }
    }

    let mut worlds: u128 = 1;
    for e in &edges {
        worlds = worlds.saturating_mul(e.outcomes.len() as u128);
        if worlds > ENUMERATION_LIMIT {
            return Err(SimError::EnumerationTooLarge {
                worlds,
                limit: ENUMERATION_LIMIT,
            });
        }
    }

    // realized adjacency grouped by source for the per-world evaluation
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adj[e.source as usize].push(i);
    }

    let mut eval = WorldEval {
        realized: vec![None; edges.len()],
        ws: Workspace::new(n),
        adj,
        seeds,
        horizon,
        total: T::zero(),
        prob_mass: T::zero(),
    };
    descend(&edges, 0, T::one(), &mut eval);
    debug_assert!((eval.prob_mass - T::one()).abs() < scalar(1e-9));
    Ok(SpreadEstimate {
        mean: eval.total,
        std_error: T::zero(),
        runs: worlds as usize,
        exact: true,
    })
}

struct WorldEval<'a, T> {
    realized: Vec<Option<u32>>,
    ws: Workspace,
    adj: Vec<Vec<usize>>,
    seeds: &'a SeedSet,
    horizon: usize,
    total: T,
    prob_mass: T,
}

fn descend<T: Scalar>(edges: &[EdgeWorld<T>], idx: usize, prob: T, eval: &mut WorldEval<'_, T>) {
    if idx == edges.len() {
        let count = evaluate_world(edges, eval);
        eval.total = eval.total + prob * scalar(count as f64);
        eval.prob_mass = eval.prob_mass + prob;
        return;
    }
    for oi in 0..edges[idx].outcomes.len() {
        let (landing, q) = edges[idx].outcomes[oi];
        eval.realized[idx] = landing;
        descend(edges, idx + 1, prob * q, eval);
    }
}

fn evaluate_world<T: Scalar>(edges: &[EdgeWorld<T>], eval: &mut WorldEval<'_, T>) -> usize {
    let ws = &mut eval.ws;
    ws.reset();
    for &s in eval.seeds.ids() {
        ws.dist[s as usize] = 0;
        ws.touched.push(s);
        ws.heap.push(Reverse((0, s)));
    }
    let mut count = 0usize;
    while let Some(Reverse((t, u))) = ws.heap.pop() {
        if t != ws.dist[u as usize] {
            continue;
        }
        count += 1;
        for &ei in &eval.adj[u as usize] {
            let Some(delta) = eval.realized[ei] else {
                continue;
            };
            let arrival = t as u64 + delta as u64;
            if arrival > eval.horizon as u64 {
                continue;
            }
            let arrival = arrival as u32;
            let v = edges[ei].target as usize;
            if arrival < ws.dist[v] {
                if ws.dist[v] == UNREACHED {
                    ws.touched.push(edges[ei].target);
                }
                ws.dist[v] = arrival;
                ws.heap.push(Reverse((arrival, edges[ei].target)));
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::BoostedGraphView;
    use crate::delay::DelayPmf;
    use crate::graph::DirectedGraph;

    fn unit_delays(n: usize) -> Vec<DelayPmf<f64>> {
        vec![DelayPmf::deterministic(1); n]
    }

    #[test]
    fn isolated_seed_counts_itself() {
        let g = DirectedGraph::from_weighted_edges(1, &[], unit_delays(1)).unwrap();
        let seeds = SeedSet::new(vec![0], 1).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let mut rng = rng::stream(1, 0, 0);
        for horizon in [0, 3, 10] {
            let out = simulate_once(&view, &seeds, horizon, &mut rng);
            assert_eq!(out.activated_count, 1);
            assert_eq!(out.activation_time[0], Some(0));
        }
    }

    #[test]
    fn horizon_boundary_on_certain_edge() {
        let g = DirectedGraph::from_weighted_edges(2, &[(0, 1, 1.0)], unit_delays(2)).unwrap();
        let seeds = SeedSet::new(vec![0], 2).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let mut rng = rng::stream(2, 0, 0);
        assert_eq!(simulate_once(&view, &seeds, 0, &mut rng).activated_count, 1);
        assert_eq!(simulate_once(&view, &seeds, 1, &mut rng).activated_count, 2);
    }

    #[test]
    fn certain_chain_respects_hop_times() {
        let g = DirectedGraph::from_weighted_edges(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
            unit_delays(4),
        )
        .unwrap();
        let seeds = SeedSet::new(vec![0], 4).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let mut rng = rng::stream(3, 0, 0);
        let out = simulate_once(&view, &seeds, 2, &mut rng);
        assert_eq!(out.activated_count, 3);
        assert_eq!(out.activation_time, vec![Some(0), Some(1), Some(2), None]);
    }

    #[test]
    fn exact_single_edge_half() {
        let g = DirectedGraph::from_weighted_edges(2, &[(0, 1, 0.5)], unit_delays(2)).unwrap();
        let seeds = SeedSet::new(vec![0], 2).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        for horizon in [1, 2, 5] {
            let est = exact_spread(&view, &seeds, horizon).unwrap();
            assert!((est.mean - 1.5).abs() < 1e-12);
            assert!(est.exact);
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn exact_four_world_delay_split() {
        let delays = vec![DelayPmf::<f64>::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap(); 2];
        let g = DirectedGraph::from_weighted_edges(2, &[(0, 1, 0.5)], delays).unwrap();
        let seeds = SeedSet::new(vec![0], 2).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let est = exact_spread(&view, &seeds, 1).unwrap();
        assert!((est.mean - 1.25).abs() < 1e-12);
    }

    #[test]
    fn exact_zero_horizon_is_seed_count() {
        let g = DirectedGraph::from_weighted_edges(
            4,
            &[(0, 1, 0.9), (1, 2, 0.9), (2, 3, 0.9)],
            unit_delays(4),
        )
        .unwrap();
        let seeds = SeedSet::new(vec![0, 2], 4).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let est = exact_spread(&view, &seeds, 0).unwrap();
        assert_eq!(est.mean, 2.0);
    }

    #[test]
    fn enumeration_bound_enforced() {
        // 30 edges with two-point supports blow past the world limit
        let n = 31;
        let delays = vec![DelayPmf::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap(); n];
        let edges: Vec<(u32, u32, f64)> =
            (0..30).map(|i| (i as u32, i as u32 + 1, 0.5)).collect();
        let g = DirectedGraph::from_weighted_edges(n, &edges, delays).unwrap();
        let seeds = SeedSet::new(vec![0], n).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        assert!(matches!(
            exact_spread(&view, &seeds, 5),
            Err(SimError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn estimate_is_reproducible_and_single_run_matches() {
        let g = DirectedGraph::from_weighted_edges(
            3,
            &[(0, 1, 0.5), (1, 2, 0.5)],
            unit_delays(3),
        )
        .unwrap();
        let seeds = SeedSet::new(vec![0], 3).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        let a = estimate_spread(&view, &seeds, 2, 500, 77);
        let b = estimate_spread(&view, &seeds, 2, 500, 77);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std_error, b.std_error);

        let one = estimate_spread(&view, &seeds, 2, 1, 5);
        let mut rng = rng::stream(5, domain::SIM_RUN, 0);
        let single = simulate_once(&view, &seeds, 2, &mut rng);
        assert_eq!(one.mean, single.activated_count as f64);
        assert_eq!(one.std_error, 0.0);
    }

    #[test]
    fn trace_parent_links_are_consistent() {
        let g = DirectedGraph::from_weighted_edges(
            5,
            &[(0, 1, 0.8), (0, 2, 0.8), (1, 3, 0.8), (2, 3, 0.8), (3, 4, 0.8)],
            vec![DelayPmf::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap(); 5],
        )
        .unwrap();
        let seeds = SeedSet::new(vec![0], 5).unwrap();
        let view = BoostedGraphView::unboosted(&g);
        for i in 0..200 {
            let mut rng = rng::stream(13, 99, i);
            let trace = simulate_cascade(&view, &seeds, 4, &mut rng);
            for v in 0..5usize {
                if let Some(t) = trace.activation_time[v] {
                    if seeds.contains(v as u32) {
                        assert_eq!(t, 0);
                        continue;
                    }
                    let p = trace.parent[v].expect("activated non-seed has a parent") as usize;
                    let pt = trace.activation_time[p].expect("parent activated");
                    assert!(pt < t, "parent strictly earlier");
                    assert_eq!(trace.hops[v], trace.hops[p] + 1);
                    assert!(trace.spawned[p], "realized parent spawned someone");
                }
            }
        }
    }
}
