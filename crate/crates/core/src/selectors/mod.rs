//! The boost-set-selection algorithm family: simulation greedy, tree-based
//! gain algorithms, independent-path algorithms, distance heuristics,
//! last-node and baselines.
//!
//! Every selector returns at most `k` distinct candidate nodes, is
//! deterministic given its inputs and seed, and breaks score ties by larger
//! out-degree, then smaller node id.

mod greedy;
mod independent;
mod proximity;
mod tree_gain;

pub use greedy::{select_greedy, select_greedy_batch};
pub use independent::select_miips;
pub use proximity::{
    select_baseline, select_distance, select_last_node, BaselineKind, DistanceBasis,
    DistanceMetric,
};
pub use tree_gain::{select_moboo, select_tmoboo};

use std::time::Duration;

use crate::graph::DirectedGraph;
use crate::scalar::Scalar;

/// Ordered result of a selector: the chosen nodes with their per-step score
/// (estimated spread gain for the gain-based selectors, the ranking score for
/// the heuristics).
#[derive(Debug, Clone)]
pub struct BoostSelection<T> {
    pub nodes: Vec<u32>,
    pub step_gain: Vec<T>,
    pub selector_name: String,
    pub elapsed: Duration,
    /// Set when the selector ran out of candidates before reaching `k`.
    pub warning: Option<String>,
}

impl<T: Scalar> BoostSelection<T> {
    pub(crate) fn finish(
        name: &str,
        started: std::time::Instant,
        nodes: Vec<u32>,
        step_gain: Vec<T>,
        k: usize,
    ) -> Self {
        let warning = (nodes.len() < k)
            .then(|| format!("selected {} of {} requested nodes", nodes.len(), k));
        Self {
            nodes,
            step_gain,
            selector_name: name.to_string(),
            elapsed: started.elapsed(),
            warning,
        }
    }
}

/// Picks the candidate with the largest score; ties go to the larger
/// out-degree, then the smaller id. Returns `None` on an empty pool.
pub(crate) fn argmax_candidate<T: Scalar>(
    graph: &DirectedGraph<T>,
    scored: impl IntoIterator<Item = (u32, T)>,
) -> Option<(u32, T)> {
    scored.into_iter().max_by(|&(u, su), &(v, sv)| {
        su.partial_cmp(&sv)
            .expect("scores are never NaN")
            .then_with(|| graph.out_degree(u).cmp(&graph.out_degree(v)))
            .then_with(|| v.cmp(&u))
    })
}

/// Sorts candidates best-first under the same total order as
/// [`argmax_candidate`] (descending score, descending out-degree,
/// ascending id).
pub(crate) fn sort_candidates_desc<T: Scalar>(
    graph: &DirectedGraph<T>,
    scored: &mut [(u32, T)],
) {
    scored.sort_by(|&(u, su), &(v, sv)| {
        sv.partial_cmp(&su)
            .expect("scores are never NaN")
            .then_with(|| graph.out_degree(v).cmp(&graph.out_degree(u)))
            .then_with(|| u.cmp(&v))
    });
}
