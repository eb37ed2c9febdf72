//! Time-constrained independent-cascade diffusion with node boosting.
//!
//! The crate models diffusion on a directed graph where each edge carries an
//! activation probability and each node a discrete activation-delay
//! distribution; only activations arriving by a horizon `T` count. A *boost*
//! strengthens a node by lifting its outgoing edge probabilities and
//! left-shifting its delay distribution, and the selectors in
//! [`selectors`] pick the `k`-node boost set that maximizes the boosted
//! spread.
//!
//! All numeric types are generic over the [`Scalar`] floating-point type;
//! `f64` aliases are exported at the crate root.

#![forbid(unsafe_code)]

pub mod boost;
pub mod delay;
pub mod graph;
pub mod paths;
pub mod rng;
pub mod scalar;
pub mod selectors;
pub mod sim;

pub use boost::{BoostSpec, BoostedGraphView, DelayPolicy};
pub use delay::DelayPmf;
pub use graph::{DirectedGraph, EdgeList, SeedSet};
pub use paths::{IndependentPathSet, InfluenceTree, RankMethod, TreeKind};
pub use scalar::Scalar;
pub use selectors::BoostSelection;
pub use sim::{ActivationOutcome, CascadeTrace, DiffusionConfig, SpreadEstimate};

/// `f64` graph, the default working precision.
pub type Graph = DirectedGraph<f64>;
/// `f64` delay distribution.
pub type Pmf = DelayPmf<f64>;
/// `f64` boosted overlay.
pub type View<'g> = BoostedGraphView<'g, f64>;
/// `f64` influence tree.
pub type Tree = InfluenceTree<f64>;
/// `f64` spread estimate.
pub type Spread = SpreadEstimate<f64>;
/// `f64` selector result.
pub type Selection = BoostSelection<f64>;
