//! Most-probable-path structures: maximum influence trees (with and without
//! time constraints), truncated path-time convolutions, and node-disjoint
//! independent path sets.

mod convolve;
mod independent;
mod tree;

pub use convolve::{
    convolve_dists, fast_path_time_prob, path_time_prob, total_mass, truncated_convolve,
};
pub use independent::{
    ap_from_paths, ap_from_ranks, build_independent_paths, rank_path, IndependentPathSet,
    RankMethod, RankedPath,
};
pub use tree::{
    build_mit, build_mit_partial, build_mtcit, build_mtcit_partial, InfluenceTree, TreeKind,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathsError {
    #[error("fast path-time approximation needs a path of at least 2 nodes, got {len}")]
    PathTooShort { len: usize },
}
