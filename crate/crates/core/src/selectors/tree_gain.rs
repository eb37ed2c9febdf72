//! Gain-based selection over the maximum influence trees.

use std::time::Instant;

use crate::boost::{boosted_delay, boosted_prob, BoostSpec, BoostedGraphView};
use crate::delay::DelayPmf;
use crate::graph::{DirectedGraph, SeedSet};
use crate::paths::{
    build_mit, build_mtcit, convolve_dists, fast_path_time_prob, total_mass, truncated_convolve,
    InfluenceTree,
};
use crate::scalar::Scalar;

use super::{argmax_candidate, BoostSelection};

fn candidate_mask<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    augmented_len: usize,
) -> Vec<bool> {
    let mut mask = vec![false; augmented_len];
    for v in graph.candidate_set(seeds, horizon) {
        mask[v as usize] = true;
    }
    mask
}

/// Per-node spread gain of boosting each MIT member by `b`, from one
/// bottom-up pass: boosting `u` scales every child subtree's activation
/// probabilities by `p'/p`, so
/// `g(u) = sum_child (p'/p - 1) * subtree_ap_sum(child)`.
/// Indexed by node id; zero for the root and for non-members.
pub fn moboo_gains<T: Scalar>(tree: &InfluenceTree<T>, b: T) -> Vec<T> {
    let n = tree.capacity();
    let subtree_ap = subtree_ap_sums(tree, n);
    let mut gains = vec![T::zero(); n];
    for &u in tree.members() {
        if u == tree.root() {
            continue;
        }
        gains[u as usize] = tree
            .children(u)
            .iter()
            .map(|&v| {
                let p = tree.edge_prob_from_parent(v);
                (boosted_prob(p, b) / p - T::one()) * subtree_ap[v as usize]
            })
            .sum::<T>();
    }
    gains
}

/// Sum of `ap` over each node's subtree (the node included), bottom-up.
fn subtree_ap_sums<T: Scalar>(tree: &InfluenceTree<T>, n: usize) -> Vec<T> {
    let mut sums = vec![T::zero(); n];
    for &w in tree.members().iter().rev() {
        sums[w as usize] = sums[w as usize] + tree.ap(w);
        if let Some(p) = tree.parent(w) {
            sums[p as usize] = sums[p as usize] + sums[w as usize];
        }
    }
    sums
}

/// Per-node gains over the MTCIT: for every member `w` and every ancestor `u`
/// on its root path, the change in `w`'s time-constrained activation
/// probability when `u`'s on-path edge is lifted and `u`'s delay reshaped,
/// accumulated into `g(u)`. `exact_pt` selects the exact truncated
/// convolution; otherwise the fast last-interior-node approximation is used
/// for both the baseline and the boosted term. Already-boosted nodes are
/// skipped.
pub fn tmoboo_gains<T: Scalar>(
    tree: &InfluenceTree<T>,
    view: &BoostedGraphView<'_, T>,
    exact_pt: bool,
) -> Vec<T> {
    let n = tree.capacity();
    let spec = view.spec();
    let horizon = tree.horizon();
    let root = tree.root();
    // reshaped delays of candidate ancestors, filled on demand
    let mut shifted: Vec<Option<DelayPmf<T>>> = vec![None; n];
    let mut gains = vec![T::zero(); n];

    for &w in tree.members() {
        if w == root {
            continue;
        }
        let path = tree.path_from_root(w);
        let last = path.len() - 1;
        let pp_w = tree.pp(w);

        // suffix[j] = arrival distribution of the delays of path[j..last]
        let suffixes: Vec<Vec<T>> = if exact_pt {
            let mut sufs = vec![Vec::new(); last + 1];
            let mut acc = vec![T::zero(); horizon + 1];
            acc[0] = T::one();
            sufs[last] = acc.clone();
            for j in (1..last).rev() {
                acc = truncated_convolve(&acc, view.delay(path[j]), horizon);
                sufs[j] = acc.clone();
            }
            sufs
        } else {
            Vec::new()
        };
        let fast_base = if !exact_pt && last >= 2 {
            fast_path_time_prob(view.delay(path[last - 1]), last, horizon).expect("last >= 2")
        } else {
            T::one()
        };

        for j in 1..last {
            let u = path[j];
            if view.is_boosted(u) {
                continue;
            }
            let p_cur = tree.edge_prob_from_parent(path[j + 1]);
            let ratio = boosted_prob(p_cur, spec.b) / p_cur;
            let pmf = shifted[u as usize]
                .get_or_insert_with(|| boosted_delay(view.delay(u), spec.b, spec.policy));
            let g = if exact_pt {
                let pre = tree.time_dist(u).expect("MTCIT member carries a dist");
                let with_boost = truncated_convolve(pre, pmf, horizon);
                let arrival = convolve_dists(&with_boost, &suffixes[j + 1], horizon);
                pp_w * ratio * total_mass(&arrival) - tree.ap(w)
            } else {
                let p_t_boosted = if j == last - 1 {
                    fast_path_time_prob(pmf, last, horizon).expect("last >= 2")
                } else {
                    fast_base
                };
                pp_w * (ratio * p_t_boosted - fast_base)
            };
            gains[u as usize] = gains[u as usize] + g;
        }
    }
    gains
}

/// Most-probable-path gain selection: builds the MIT once, then each round
/// takes the node maximizing [`moboo_gains`]. With `rebuild` the tree is
/// rebuilt on the boosted view after every pick; otherwise the picked node's
/// subtree probabilities are rescaled in place.
pub fn select_moboo<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    spec: BoostSpec<T>,
    rebuild: bool,
) -> BoostSelection<T> {
    let started = Instant::now();
    let (aug, root) = graph.augment_virtual_seed(seeds);
    let in_candidates = candidate_mask(graph, seeds, horizon, aug.node_count());
    let mut chosen: Vec<u32> = Vec::new();
    let mut gains: Vec<T> = Vec::new();
    let mut view = BoostedGraphView::unboosted_with_spec(&aug, spec);
    let mut tree = build_mit(&view, root, horizon);

    for _ in 0..k {
        let round = moboo_gains(&tree, spec.b);
        let scored = tree
            .members()
            .iter()
            .copied()
            .filter(|&u| u != root && in_candidates[u as usize] && !chosen.contains(&u))
            .map(|u| (u, round[u as usize]));
        let Some((best, gain)) = argmax_candidate(&aug, scored) else {
            break;
        };
        chosen.push(best);
        gains.push(gain);
        view = BoostedGraphView::new(&aug, &chosen, spec).expect("chosen ids in range");
        if rebuild {
            tree = build_mit(&view, root, horizon);
        } else {
            tree.refresh_subtree(&view, best);
        }
    }
    let name = if rebuild { "moboo_rebuild" } else { "moboo" };
    BoostSelection::finish(name, started, chosen, gains, k)
}

/// Time-constrained gain selection over the MTCIT, taking the node
/// maximizing [`tmoboo_gains`] each round and updating the picked node's
/// subtree in place.
pub fn select_tmoboo<T: Scalar>(
    graph: &DirectedGraph<T>,
    seeds: &SeedSet,
    horizon: usize,
    k: usize,
    spec: BoostSpec<T>,
    exact_pt: bool,
) -> BoostSelection<T> {
    let started = Instant::now();
    let (aug, root) = graph.augment_virtual_seed(seeds);
    let in_candidates = candidate_mask(graph, seeds, horizon, aug.node_count());
    let mut chosen: Vec<u32> = Vec::new();
    let mut step_gains: Vec<T> = Vec::new();
    let mut view = BoostedGraphView::unboosted_with_spec(&aug, spec);
    let mut tree = build_mtcit(&view, root, horizon);

    for _ in 0..k {
        let gains = tmoboo_gains(&tree, &view, exact_pt);
        let scored = tree
            .members()
            .iter()
            .copied()
            .filter(|&u| u != root && in_candidates[u as usize] && !chosen.contains(&u))
            .map(|u| (u, gains[u as usize]));
        let Some((best, gain)) = argmax_candidate(&aug, scored) else {
            break;
        };
        chosen.push(best);
        step_gains.push(gain);
        view = BoostedGraphView::new(&aug, &chosen, spec).expect("chosen ids in range");
        tree.refresh_subtree(&view, best);
    }
    let name = if exact_pt { "tmoboo" } else { "fast_tmoboo" };
    BoostSelection::finish(name, started, chosen, step_gains, k)
}
