//! Node-disjoint-interior independent paths with pluggable ranking.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::boost::{boosted_delay, boosted_prob, BoostedGraphView};
use crate::delay::DelayPmf;
use crate::graph::SeedSet;
use crate::scalar::Scalar;

use super::convolve::{fast_path_time_prob, path_time_prob, total_mass, truncated_convolve};

/// How candidate paths are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Propagation probability, ignoring delays.
    Pp,
    /// `pp * p_T` with the exact truncated convolution.
    AptExact,
    /// `pp * p_T` with the fast last-interior-node approximation.
    AptFast,
}

/// A ranked root-to-target path; `nodes` starts at the virtual seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPath<T> {
    pub nodes: Vec<u32>,
    pub rank: T,
}

/// For each target, up to `lambda` paths from the virtual seed whose
/// interiors are pairwise disjoint (only the root, the seeds and the target
/// itself may repeat).
#[derive(Debug, Clone)]
pub struct IndependentPathSet<T> {
    per_target: Vec<Vec<RankedPath<T>>>,
    lambda: usize,
    rm: RankMethod,
    horizon: usize,
    root: u32,
}

impl<T: Scalar> IndependentPathSet<T> {
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn rank_method(&self) -> RankMethod {
        self.rm
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn paths(&self, w: u32) -> &[RankedPath<T>] {
        &self.per_target[w as usize]
    }

    /// Activation probability of `w` through its independent paths:
    /// `1 - prod_i (1 - rank_i)`; zero with no paths.
    pub fn ap(&self, w: u32) -> T {
        ap_from_ranks(self.per_target[w as usize].iter().map(|p| p.rank))
    }

    /// Recomputes every stored path's rank under `view`, keeping structures.
    pub fn refresh_ranks(&mut self, view: &BoostedGraphView<'_, T>) {
        for paths in &mut self.per_target {
            for path in paths {
                path.rank = rank_path(view, &path.nodes, self.rm, self.horizon, None);
            }
        }
    }
}

/// `1 - prod (1 - rank)` over a path set's rank values.
pub fn ap_from_ranks<T: Scalar>(ranks: impl IntoIterator<Item = T>) -> T {
    let mut miss = T::one();
    for r in ranks {
        miss = miss * (T::one() - r);
    }
    T::one() - miss
}

/// Activation probability of `w` from its stored independent paths.
pub fn ap_from_paths<T: Scalar>(set: &IndependentPathSet<T>, w: u32) -> T {
    set.ap(w)
}

/// Ranks one explicit path under `view`; `extra_boost` evaluates the path as
/// if that node were additionally boosted (its on-path out-edge lifted and
/// its delay reshaped).
pub fn rank_path<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    nodes: &[u32],
    rm: RankMethod,
    horizon: usize,
    extra_boost: Option<u32>,
) -> T {
    debug_assert!(nodes.len() >= 2, "a path has at least two nodes");
    let spec = view.spec();
    let mut pp = T::one();
    for pair in nodes.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        let raw = view
            .graph()
            .out_edges(u)
            .iter()
            .find(|e| e.target == v)
            .expect("path edge exists in the graph")
            .prob;
        let mut p = view.edge_prob(u, raw);
        if extra_boost == Some(u) && !view.is_boosted(u) {
            p = boosted_prob(raw, spec.b);
        }
        pp = pp * p;
    }
    if pp <= T::zero() {
        return T::zero();
    }
    let eff_delay = |u: u32| -> DelayPmf<T> {
        if extra_boost == Some(u) && !view.is_boosted(u) {
            boosted_delay(view.delay(u), spec.b, spec.policy)
        } else {
            view.delay(u).clone()
        }
    };
    match rm {
        RankMethod::Pp => pp,
        RankMethod::AptExact => {
            let delays: Vec<DelayPmf<T>> =
                nodes[..nodes.len() - 1].iter().map(|&u| eff_delay(u)).collect();
            let refs: Vec<&DelayPmf<T>> = delays.iter().collect();
            pp * path_time_prob(&refs, horizon)
        }
        RankMethod::AptFast => {
            // real node count excludes the zero-delay virtual root
            let real_len = nodes.len() - 1;
            if real_len < 2 {
                pp
            } else {
                let last_interior = nodes[nodes.len() - 2];
                pp * fast_path_time_prob(&eff_delay(last_interior), real_len, horizon)
                    .expect("real_len >= 2")
            }
        }
    }
}

/// Builds up to `lambda` interior-disjoint paths from `root` to every node:
/// iteration `i` finds the best remaining path with the interiors of the
/// previous ones removed (the root, the seeds and the target are always
/// kept), stopping early when no path remains.
pub fn build_independent_paths<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    seeds: &SeedSet,
    lambda: usize,
    rm: RankMethod,
    horizon: usize,
) -> IndependentPathSet<T> {
    assert!(lambda >= 1, "at least one path per target");
    let n = view.node_count();
    let keep: Vec<bool> = {
        let mut keep = vec![false; n];
        keep[root as usize] = true;
        for &s in seeds.ids() {
            keep[s as usize] = true;
        }
        keep
    };
    let per_target: Vec<Vec<RankedPath<T>>> = (0..n as u32)
        .into_par_iter()
        .map(|w| {
            if w == root {
                return Vec::new();
            }
            let mut removed = vec![false; n];
            let mut paths = Vec::new();
            for _ in 0..lambda {
                let Some(path) = best_path(view, root, w, &removed, rm, horizon) else {
                    break;
                };
                for &x in &path.nodes[1..path.nodes.len() - 1] {
                    if !keep[x as usize] && x != w {
                        removed[x as usize] = true;
                    }
                }
                paths.push(path);
            }
            paths
        })
        .collect();
    IndependentPathSet {
        per_target,
        lambda,
        rm,
        horizon,
        root,
    }
}

struct SearchEntry<T> {
    key: T,
    node: u32,
    parent: u32,
}

impl<T: Scalar> PartialEq for SearchEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for SearchEntry<T> {}
impl<T: Scalar> PartialOrd for SearchEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for SearchEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .partial_cmp(&other.key)
            .expect("ranks are never NaN")
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.parent.cmp(&self.parent))
    }
}

/// Best-first search for the top-ranked `root -> target` path avoiding
/// `removed` nodes. Exact for `Pp` and `AptExact` (their keys only shrink
/// under extension); first-settled heuristic for the fast rank.
fn best_path<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    target: u32,
    removed: &[bool],
    rm: RankMethod,
    horizon: usize,
) -> Option<RankedPath<T>> {
    let n = view.node_count();
    let mut settled = vec![false; n];
    let mut parent = vec![u32::MAX; n];
    let mut pp = vec![T::zero(); n];
    let mut t_min = vec![0u32; n];
    let mut len = vec![0u32; n]; // real nodes on the path so far
    let mut dist: Vec<Option<Vec<T>>> = vec![None; n];
    let mut heap: BinaryHeap<SearchEntry<T>> = BinaryHeap::new();

    settled[root as usize] = true;
    pp[root as usize] = T::one();
    if rm == RankMethod::AptExact {
        let mut d = vec![T::zero(); horizon + 1];
        d[0] = T::one();
        dist[root as usize] = Some(d);
    }

    let mut rank_of_target = None;
    let expand = |u: u32,
                      settled: &[bool],
                      pp: &[T],
                      t_min: &[u32],
                      len: &[u32],
                      dist: &[Option<Vec<T>>],
                      heap: &mut BinaryHeap<SearchEntry<T>>| {
        let ext = match rm {
            RankMethod::Pp => {
                let Some(min_delay) = view.delay(u).min_delay() else {
                    return;
                };
                if t_min[u as usize] as u64 + min_delay as u64 > horizon as u64 {
                    return;
                }
                T::one()
            }
            RankMethod::AptExact => {
                let d = dist[u as usize].as_deref().expect("settled carries dist");
                total_mass(&truncated_convolve(d, view.delay(u), horizon))
            }
            RankMethod::AptFast => {
                // fast rank of the extended path: cdf of u's delay at
                // floor(horizon / new_real_len - 1); new_real_len = len[u] + 1
                let new_len = len[u as usize] + 1;
                if new_len < 2 {
                    T::one()
                } else {
                    fast_path_time_prob(view.delay(u), new_len as usize, horizon)
                        .expect("new_len >= 2")
                }
            }
        };
        if ext <= T::zero() {
            return;
        }
        for edge in view.graph().out_edges(u) {
            let v = edge.target;
            if settled[v as usize] || (removed[v as usize] && v != target) {
                continue;
            }
            let p = view.edge_prob(u, edge.prob);
            if p <= T::zero() {
                continue;
            }
            let key = pp[u as usize] * p * ext;
            if key > T::zero() {
                heap.push(SearchEntry { key, node: v, parent: u });
            }
        }
    };

    expand(root, &settled, &pp, &t_min, &len, &dist, &mut heap);
    while let Some(entry) = heap.pop() {
        let w = entry.node as usize;
        if settled[w] {
            continue;
        }
        settled[w] = true;
        let u = entry.parent;
        parent[w] = u;
        len[w] = len[u as usize] + 1;
        let raw = view
            .graph()
            .out_edges(u)
            .iter()
            .find(|e| e.target == entry.node)
            .expect("edge exists")
            .prob;
        pp[w] = pp[u as usize] * view.edge_prob(u, raw);
        match rm {
            RankMethod::Pp => {
                t_min[w] = t_min[u as usize]
                    + view.delay(u).min_delay().expect("checked at expansion") as u32;
            }
            RankMethod::AptExact => {
                let d = dist[u as usize].as_deref().expect("settled carries dist");
                dist[w] = Some(truncated_convolve(d, view.delay(u), horizon));
            }
            RankMethod::AptFast => {}
        }
        if entry.node == target {
            rank_of_target = Some(entry.key);
            break;
        }
        expand(entry.node, &settled, &pp, &t_min, &len, &dist, &mut heap);
    }

    let rank = rank_of_target?;
    let mut nodes = vec![target];
    let mut cur = target;
    while cur != root {
        cur = parent[cur as usize];
        nodes.push(cur);
    }
    nodes.reverse();
    Some(RankedPath { nodes, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::BoostedGraphView;
    use crate::graph::DirectedGraph;

    fn unit_delays(n: usize) -> Vec<DelayPmf<f64>> {
        vec![DelayPmf::deterministic(1); n]
    }

    fn augmented(
        g: &DirectedGraph<f64>,
        seeds: &[u32],
    ) -> (DirectedGraph<f64>, u32, SeedSet) {
        let seeds = SeedSet::new(seeds.to_vec(), g.node_count()).unwrap();
        let (aug, root) = g.augment_virtual_seed(&seeds);
        (aug, root, seeds)
    }

    #[test]
    fn diamond_yields_two_disjoint_paths() {
        // s -> {a, b} -> w with equal probabilities
        let g = DirectedGraph::from_weighted_edges(
            4,
            &[(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)],
            unit_delays(4),
        )
        .unwrap();
        let (aug, root, seeds) = augmented(&g, &[0]);
        let view = BoostedGraphView::unboosted(&aug);
        let set = build_independent_paths(&view, root, &seeds, 2, RankMethod::Pp, 10);
        let paths = set.paths(3);
        assert_eq!(paths.len(), 2);
        let interiors: Vec<Vec<u32>> = paths
            .iter()
            .map(|p| {
                p.nodes[1..p.nodes.len() - 1]
                    .iter()
                    .copied()
                    .filter(|&x| x != root && x != 0 && x != 3)
                    .collect()
            })
            .collect();
        assert!(interiors[0].iter().all(|x| !interiors[1].contains(x)));
        assert!((paths[0].rank - 0.25).abs() < 1e-12);
        assert!((paths[1].rank - 0.25).abs() < 1e-12);
        assert!((set.ap(3) - (1.0 - 0.75 * 0.75)).abs() < 1e-12);
    }

    #[test]
    fn single_route_exhausts_after_one_path() {
        let g = DirectedGraph::from_weighted_edges(
            3,
            &[(0, 1, 0.5), (1, 2, 0.5)],
            unit_delays(3),
        )
        .unwrap();
        let (aug, root, seeds) = augmented(&g, &[0]);
        let view = BoostedGraphView::unboosted(&aug);
        let set = build_independent_paths(&view, root, &seeds, 2, RankMethod::Pp, 10);
        assert_eq!(set.paths(2).len(), 1);
        assert_eq!(set.paths(2)[0].nodes, vec![root, 0, 1, 2]);
    }

    #[test]
    fn no_paths_means_zero_ap() {
        let g = DirectedGraph::from_weighted_edges(3, &[(0, 1, 0.5)], unit_delays(3)).unwrap();
        let (aug, root, seeds) = augmented(&g, &[0]);
        let view = BoostedGraphView::unboosted(&aug);
        let set = build_independent_paths(&view, root, &seeds, 2, RankMethod::Pp, 10);
        assert!(set.paths(2).is_empty());
        assert_eq!(set.ap(2), 0.0);
    }

    #[test]
    fn rank_combination_examples() {
        assert!((ap_from_ranks([0.3f64]) - 0.3).abs() < 1e-15);
        assert!((ap_from_ranks([0.5f64, 0.5]) - 0.75).abs() < 1e-15);
        assert_eq!(ap_from_ranks(std::iter::empty::<f64>()), 0.0);
    }
}
