//! Seed-proximity heuristics: simulated and tree-based distances, the
//! last-node heuristic, and the random / top-degree baselines.

use std::time::Instant;

use crate::boost::BoostedGraphView;
use crate::graph::{DirectedGraph, SeedSet};
use crate::paths::{
    build_mit, build_mit_partial, build_mtcit, build_mtcit_partial, InfluenceTree,
};
use crate::rng::{self, domain};
use crate::scalar::{scalar, Scalar};
use crate::sim::simulate_cascade;

use super::{sort_candidates_desc, BoostSelection};

/// Where distances come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceBasis {
    /// Realized distances averaged over `runs` cascades.
    Simulation,
    Mit,
    Mtcit,
}

/// What "distance" means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    /// Activation time (simulation) or summed mean conditional delays (tree).
    Time,
    /// Realized path probability (simulation) or activation probability
    /// (tree); larger is closer.
    Prob,
    /// Hop count of the realized or tree path.
    Hops,
}

fn distance_name(basis: DistanceBasis, metric: DistanceMetric) -> &'static str {
    match (basis, metric) {
        (DistanceBasis::Simulation, DistanceMetric::Time) => "spt_d",
        (DistanceBasis::Simulation, DistanceMetric::Prob) => "spp_d",
        (DistanceBasis::Simulation, DistanceMetric::Hops) => "sph_d",
        (DistanceBasis::Mit, DistanceMetric::Time) => "spt_mit",
        (DistanceBasis::Mit, DistanceMetric::Prob) => "spp_mit",
        (DistanceBasis::Mit, DistanceMetric::Hops) => "sph_mit",
        (DistanceBasis::Mtcit, DistanceMetric::Time) => "spt_mtcit",
        (DistanceBasis::Mtcit, DistanceMetric::Prob) => "spp_mtcit",
        (DistanceBasis::Mtcit, DistanceMetric::Hops) => "sph_mtcit",
    }
}

/// Boosts the nodes closest to the seeds. Simulation basis: over `runs`
/// unboosted cascades, each reached node records its realized activation
/// time / hop depth / path probability, and nodes are ranked by the average
/// over the runs that reached them. Tree basis: distances are read off the
/// MIT or MTCIT root paths; the probability variant stops the build at the
/// first `k` settled nodes.
pub fn select_distance<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    basis: DistanceBasis,
    metric: DistanceMetric,
    runs: usize,
    rng_seed: u64,
) -> BoostSelection<T> {
    let started = Instant::now();
    let name = distance_name(basis, metric);
    match basis {
        DistanceBasis::Simulation => {
            simulated_distance(graph, seeds, horizon, k, metric, runs, rng_seed, name, started)
        }
        DistanceBasis::Mit | DistanceBasis::Mtcit => {
            tree_distance(graph, seeds, horizon, k, basis, metric, name, started)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulated_distance<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    metric: DistanceMetric,
    runs: usize,
    rng_seed: u64,
    name: &str,
    started: Instant,
) -> BoostSelection<T> {
    let n = graph.node_count();
    let view = BoostedGraphView::unboosted(graph);
    let mut reached = vec![0u64; n];
    let mut time_sum = vec![0u64; n];
    let mut hop_sum = vec![0u64; n];
    let mut prob_sum = vec![T::zero(); n];
    for run in 0..runs {
        let mut rng = rng::stream(rng_seed, domain::DISTANCE, run as u64);
        let trace = simulate_cascade(&view, seeds, horizon, &mut rng);
        for v in 0..n {
            if let Some(t) = trace.activation_time[v] {
                reached[v] += 1;
                time_sum[v] += t as u64;
                hop_sum[v] += trace.hops[v] as u64;
                prob_sum[v] = prob_sum[v] + trace.path_prob[v];
            }
        }
    }
    // rank by average over the runs that reached the node; never-reached
    // nodes are unrankable
    let mut scored: Vec<(u32, T)> = (0..n as u32)
        .filter(|&v| reached[v as usize] > 0)
        .map(|v| {
            let r = scalar::<T>(reached[v as usize] as f64);
            let score = match metric {
                // negated so that "closest" sorts first under max-ordering
                DistanceMetric::Time => -scalar::<T>(time_sum[v as usize] as f64) / r,
                DistanceMetric::Hops => -scalar::<T>(hop_sum[v as usize] as f64) / r,
                DistanceMetric::Prob => prob_sum[v as usize] / r,
            };
            (v, score)
        })
        .collect();
    sort_candidates_desc(graph, &mut scored);
    scored.truncate(k);
    let (nodes, gains) = scored.into_iter().unzip();
    BoostSelection::finish(name, started, nodes, gains, k)
}

#[allow(clippy::too_many_arguments)]
fn tree_distance<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    basis: DistanceBasis,
    metric: DistanceMetric,
    name: &str,
    started: Instant,
) -> BoostSelection<T> {
    let (aug, root) = graph.augment_virtual_seed(seeds);
    let view = BoostedGraphView::unboosted(&aug);
    let prob_variant = metric == DistanceMetric::Prob;
    let tree: InfluenceTree<T> = match (basis, prob_variant) {
        // the probability variant needs only the first k settled nodes
        (DistanceBasis::Mit, true) => build_mit_partial(&view, root, horizon, k),
        (DistanceBasis::Mit, false) => build_mit(&view, root, horizon),
        (DistanceBasis::Mtcit, true) => build_mtcit_partial(&view, root, horizon, k),
        (DistanceBasis::Mtcit, false) => build_mtcit(&view, root, horizon),
        (DistanceBasis::Simulation, _) => unreachable!("handled by the caller"),
    };
    if prob_variant {
        // settle order is exactly the descending activation-probability order
        let nodes: Vec<u32> = tree
            .members()
            .iter()
            .copied()
            .filter(|&w| w != root)
            .take(k)
            .collect();
        let gains = nodes.iter().map(|&w| tree.ap(w)).collect();
        return BoostSelection::finish(name, started, nodes, gains, k);
    }
    let mut time_to: Vec<T> = vec![T::zero(); aug.node_count()];
    if metric == DistanceMetric::Time {
        for &w in tree.members() {
            if let Some(p) = tree.parent(w) {
                time_to[w as usize] = time_to[p as usize] + view.delay(p).conditional_mean();
            }
        }
    }
    let mut scored: Vec<(u32, T)> = tree
        .members()
        .iter()
        .copied()
        .filter(|&w| w != root)
        .map(|w| {
            let score = match metric {
                DistanceMetric::Time => -time_to[w as usize],
                DistanceMetric::Hops => -scalar::<T>(tree.depth(w) as f64),
                DistanceMetric::Prob => unreachable!("returned above"),
            };
            (w, score)
        })
        .collect();
    sort_candidates_desc(&aug, &mut scored);
    scored.truncate(k);
    let (nodes, gains) = scored.into_iter().unzip();
    BoostSelection::finish(name, started, nodes, gains, k)
}

/// Boosts the nodes where cascades most often stop: a node is terminal in a
/// run when it activated within the horizon but none of its landings
/// activated a new node. Ranked by terminal count over `runs` cascades.
pub fn select_last_node<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    runs: usize,
    rng_seed: u64,
) -> BoostSelection<T> {
    let started = Instant::now();
    let n = graph.node_count();
    let view = BoostedGraphView::unboosted(graph);
    let mut terminal = vec![0u64; n];
    for run in 0..runs {
        let mut rng = rng::stream(rng_seed, domain::LAST_NODE, run as u64);
        let trace = simulate_cascade(&view, seeds, horizon, &mut rng);
        for v in 0..n {
            if trace.activation_time[v].is_some() && !trace.spawned[v] {
                terminal[v] += 1;
            }
        }
    }
    let mut scored: Vec<(u32, T)> = (0..n as u32)
        .filter(|&v| terminal[v as usize] > 0)
        .map(|v| (v, scalar(terminal[v as usize] as f64)))
        .collect();
    sort_candidates_desc(graph, &mut scored);
    scored.truncate(k);
    let (nodes, gains) = scored.into_iter().unzip();
    BoostSelection::finish("last_node", started, nodes, gains, k)
}

/// Comparison baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// `k` distinct candidates drawn uniformly from `V^c`.
    Random,
    /// The `k` largest out-degree nodes of `V^c`.
    TopDegree,
}

pub fn select_baseline<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    kind: BaselineKind,
    rng_seed: u64,
) -> BoostSelection<T> {
    let started = Instant::now();
    let pool = graph.candidate_set(seeds, horizon);
    let (name, nodes): (&str, Vec<u32>) = match kind {
        BaselineKind::Random => {
            let mut rng = rng::stream(rng_seed, domain::BASELINE, 0);
            let take = k.min(pool.len());
            let picked = rand::seq::index::sample(&mut rng, pool.len(), take)
                .into_iter()
                .map(|i| pool[i])
                .collect();
            ("random", picked)
        }
        BaselineKind::TopDegree => {
            let mut scored: Vec<(u32, T)> = pool
                .iter()
                .map(|&v| (v, scalar(graph.out_degree(v) as f64)))
                .collect();
            sort_candidates_desc(graph, &mut scored);
            scored.truncate(k);
            ("top_degree", scored.into_iter().map(|(v, _)| v).collect())
        }
    };
    let gains = match kind {
        BaselineKind::Random => vec![T::zero(); nodes.len()],
        BaselineKind::TopDegree => nodes
            .iter()
            .map(|&v| scalar(graph.out_degree(v) as f64))
            .collect(),
    };
    BoostSelection::finish(name, started, nodes, gains, k)
}
