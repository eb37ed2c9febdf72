//! Simulation-based greedy selection.

use std::time::Instant;

use rayon::prelude::*;

use crate::boost::{BoostSpec, BoostedGraphView};
use crate::graph::{DirectedGraph, SeedSet};
use crate::rng::{self, domain};
use crate::scalar::Scalar;
use crate::sim::estimate_spread;

use super::{argmax_candidate, sort_candidates_desc, BoostSelection};

/// General greedy: `k` rounds, each estimating the marginal boosted spread of
/// every candidate in `V^c \ B` with `runs` simulations and picking the
/// maximum. All candidates within a round share one random stream, so the
/// argmax is a common-random-numbers comparison.
pub fn select_greedy<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    runs: usize,
    spec: BoostSpec<T>,
    rng_seed: u64,
) -> BoostSelection<T> {
    let started = Instant::now();
    let candidates = graph.candidate_set(seeds, horizon);
    let mut chosen: Vec<u32> = Vec::new();
    let mut gains: Vec<T> = Vec::new();
    for round in 0..k {
        let pool: Vec<u32> = candidates
            .iter()
            .copied()
            .filter(|u| !chosen.contains(u))
            .collect();
        if pool.is_empty() {
            break;
        }
        let round_seed = rng::mix(rng_seed, domain::GREEDY_ROUND, round as u64);
        let base_view = BoostedGraphView::new(graph, &chosen, spec)
            .expect("chosen nodes are valid candidates");
        let baseline = estimate_spread(&base_view, seeds, horizon, runs, round_seed).mean;
        let scored: Vec<(u32, T)> = pool
            .par_iter()
            .map(|&u| {
                let view = base_view.with_added(u).expect("candidate id in range");
                let mean = estimate_spread(&view, seeds, horizon, runs, round_seed).mean;
                (u, mean)
            })
            .collect();
        let (best, mean) = argmax_candidate(graph, scored).expect("pool not empty");
        chosen.push(best);
        gains.push(mean - baseline);
    }
    BoostSelection::finish("greedy", started, chosen, gains, k)
}

/// One round of greedy against the empty boost set; the top `k` candidates by
/// gain are taken at once.
pub fn select_greedy_batch<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    runs: usize,
    spec: BoostSpec<T>,
    rng_seed: u64,
) -> BoostSelection<T> {
    let started = Instant::now();
    let pool = graph.candidate_set(seeds, horizon);
    let round_seed = rng::mix(rng_seed, domain::GREEDY_ROUND, 0);
    let base_view = BoostedGraphView::unboosted_with_spec(graph, spec);
    let baseline = if pool.is_empty() {
        T::zero()
    } else {
        estimate_spread(&base_view, seeds, horizon, runs, round_seed).mean
    };
    let mut scored: Vec<(u32, T)> = pool
        .par_iter()
        .map(|&u| {
            let view = base_view.with_added(u).expect("candidate id in range");
            let mean = estimate_spread(&view, seeds, horizon, runs, round_seed).mean;
            (u, mean - baseline)
        })
        .collect();
    sort_candidates_desc(graph, &mut scored);
    scored.truncate(k);
    let (nodes, gains) = scored.into_iter().unzip();
    BoostSelection::finish("greedy_batch", started, nodes, gains, k)
}
