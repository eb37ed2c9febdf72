//! Gain-based selection over independent path sets.

use std::time::Instant;

use crate::boost::{BoostSpec, BoostedGraphView};
use crate::graph::{DirectedGraph, SeedSet};
use crate::paths::{ap_from_ranks, build_independent_paths, rank_path, RankMethod};
use crate::scalar::Scalar;

use super::{argmax_candidate, BoostSelection};

/// Independent-path gain selection. Builds up to `lambda` interior-disjoint
/// paths per target under `rm`, then each round accumulates, for every node
/// `u` on a stored path, the change in the target's combined activation
/// probability when `u` is boosted, and picks the maximum. After a pick the
/// stored paths keep their node sequences and get re-ranked under the boosted
/// view; `reroute` rebuilds the structures instead.
pub fn select_miips<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    lambda: usize,
    spec: BoostSpec<T>,
    rm: RankMethod,
    reroute: bool,
) -> BoostSelection<T> {
    let started = Instant::now();
    let (aug, root) = graph.augment_virtual_seed(seeds);
    let n_aug = aug.node_count();
    let mut in_candidates = vec![false; n_aug];
    for v in graph.candidate_set(seeds, horizon) {
        in_candidates[v as usize] = true;
    }
    let mut chosen: Vec<u32> = Vec::new();
    let mut step_gains: Vec<T> = Vec::new();
    let mut view = BoostedGraphView::unboosted_with_spec(&aug, spec);
    let mut paths = build_independent_paths(&view, root, seeds, lambda, rm, horizon);

    for _ in 0..k {
        let mut in_b = vec![false; n_aug];
        for &u in &chosen {
            in_b[u as usize] = true;
        }
        let mut gains = vec![T::zero(); n_aug];
        let mut touched = vec![false; n_aug];
        for w in 0..n_aug as u32 {
            let target_paths = paths.paths(w);
            if target_paths.is_empty() {
                continue;
            }
            let ap_w = ap_from_ranks(target_paths.iter().map(|p| p.rank));
            // nodes whose boost can change a path through them: any non-last
            // position (their on-path out-edge is lifted, their delay shifts)
            let mut cands: Vec<u32> = target_paths
                .iter()
                .flat_map(|p| p.nodes[..p.nodes.len() - 1].iter().copied())
                .filter(|&u| u != root && !in_b[u as usize] && in_candidates[u as usize])
                .collect();
            cands.sort_unstable();
            cands.dedup();
            for u in cands {
                let ap_boosted = ap_from_ranks(target_paths.iter().map(|p| {
                    if p.nodes[..p.nodes.len() - 1].contains(&u) {
                        rank_path(&view, &p.nodes, rm, horizon, Some(u))
                    } else {
                        p.rank
                    }
                }));
                gains[u as usize] = gains[u as usize] + (ap_boosted - ap_w);
                touched[u as usize] = true;
            }
        }
        let scored = (0..n_aug as u32)
            .filter(|&u| touched[u as usize])
            .map(|u| (u, gains[u as usize]));
        let Some((best, gain)) = argmax_candidate(&aug, scored) else {
            break;
        };
        chosen.push(best);
        step_gains.push(gain);
        view = BoostedGraphView::new(&aug, &chosen, spec).expect("chosen ids in range");
        if reroute {
            paths = build_independent_paths(&view, root, seeds, lambda, rm, horizon);
        } else {
            paths.refresh_ranks(&view);
        }
    }
    let name = match rm {
        RankMethod::Pp => "miips",
        RankMethod::AptExact => "tmiips",
        RankMethod::AptFast => "fast_tmiips",
    };
    BoostSelection::finish(name, started, chosen, step_gains, k)
}
