//! The node-boost transformation: edge-probability lift and delay
//! left-shift policies, plus the lazy boosted-graph overlay.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::delay::DelayPmf;
use crate::graph::{DirectedGraph, GraphError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoostError {
    #[error("boost amount b must lie in (0, 1]")]
    AmountOutOfRange,
    #[error("unknown delay policy {0:?}; expected prop_prob_only, first_tu or second_tu")]
    UnknownPolicy(String),
}

/// How boosting reshapes a node's delay distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayPolicy {
    /// Probability lift only; delays untouched.
    PropProbOnly,
    /// Raise the probability of reacting within the first time unit by up to
    /// `b`, scaling the remaining tail proportionally.
    FirstTu,
    /// Same construction applied at the second time unit, first unit fixed.
    SecondTu,
}

impl FromStr for DelayPolicy {
    type Err = BoostError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prop_prob_only" => Ok(Self::PropProbOnly),
            "first_tu" => Ok(Self::FirstTu),
            "second_tu" => Ok(Self::SecondTu),
            other => Err(BoostError::UnknownPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for DelayPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PropProbOnly => "prop_prob_only",
            Self::FirstTu => "first_tu",
            Self::SecondTu => "second_tu",
        })
    }
}

/// Boost parameters: probability increment `b` in `(0, 1]` and delay policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostSpec<T> {
    pub b: T,
    pub policy: DelayPolicy,
}

impl<T: Scalar> BoostSpec<T> {
    pub fn new(b: T, policy: DelayPolicy) -> Result<Self, BoostError> {
        if b <= T::zero() || b > T::one() {
            return Err(BoostError::AmountOutOfRange);
        }
        Ok(Self { b, policy })
    }
}

/// Boosted edge probability: `min(p + b, 1)`.
#[inline]
pub fn boosted_prob<T: Scalar>(p: T, b: T) -> T {
    (p + b).min(T::one())
}

/// Applies a delay policy: mass `delta = min(b, tail)` moves to the target
/// time unit and the remaining tail (later units and overflow) is scaled
/// proportionally, so every cdf value can only grow.
pub fn boosted_delay<T: Scalar>(pmf: &DelayPmf<T>, b: T, policy: DelayPolicy) -> DelayPmf<T> {
    let unit = match policy {
        DelayPolicy::PropProbOnly => return pmf.clone(),
        DelayPolicy::FirstTu => 1usize,
        DelayPolicy::SecondTu => 2usize,
    };
    let tail = T::one() - pmf.cdf(unit);
    let delta = b.min(tail);
    if delta <= T::zero() {
        return pmf.clone();
    }
    let ratio = (tail - delta) / tail;
    let mut mass: Vec<T> = pmf.raw_mass().to_vec();
    if mass.len() <= unit {
        mass.resize(unit + 1, T::zero());
    }
    for (t, m) in mass.iter_mut().enumerate() {
        if t > unit {
            *m = *m * ratio;
        }
    }
    mass[unit] = mass[unit] + delta;
    pmf.replace_parts(mass, pmf.overflow() * ratio)
}

/// Lazy overlay of a boost set over a base graph: boosted nodes expose lifted
/// out-edge probabilities and a reshaped delay distribution, everything else
/// reads through to the base bit-exactly.
#[derive(Debug, Clone)]
pub struct BoostedGraphView<'g, T> {
    base: &'g DirectedGraph<T>,
    spec: BoostSpec<T>,
    boosted: Vec<bool>,
    boosted_nodes: Vec<u32>,
    boosted_delays: Vec<(u32, DelayPmf<T>)>,
}

impl<'g, T: Scalar> BoostedGraphView<'g, T> {
    /// Overlays boost set `nodes` with `spec` over `base`.
    pub fn new(
        base: &'g DirectedGraph<T>,
        nodes: &[u32],
        spec: BoostSpec<T>,
    ) -> Result<Self, GraphError> {
        let mut view = Self::unboosted_with_spec(base, spec);
        for &u in nodes {
            view.add_boost(u)?;
        }
        Ok(view)
    }

    /// View with an empty boost set; behaviorally identical to the base.
    pub fn unboosted(base: &'g DirectedGraph<T>) -> Self {
        Self::unboosted_with_spec(
            base,
            BoostSpec {
                b: T::one(),
                policy: DelayPolicy::PropProbOnly,
            },
        )
    }

    /// Empty boost set, but carrying `spec` for later additions.
    pub fn unboosted_with_spec(base: &'g DirectedGraph<T>, spec: BoostSpec<T>) -> Self {
        Self {
            base,
            spec,
            boosted: vec![false; base.node_count()],
            boosted_nodes: Vec::new(),
            boosted_delays: Vec::new(),
        }
    }

    fn add_boost(&mut self, u: u32) -> Result<(), GraphError> {
        if u as usize >= self.base.node_count() {
            return Err(GraphError::NodeOutOfRange {
                id: u,
                node_count: self.base.node_count(),
            });
        }
        if !self.boosted[u as usize] {
            self.boosted[u as usize] = true;
            self.boosted_nodes.push(u);
            self.boosted_delays.push((
                u,
                boosted_delay(self.base.delay(u), self.spec.b, self.spec.policy),
            ));
        }
        Ok(())
    }

    /// Clone of this view with one more boosted node.
    pub fn with_added(&self, u: u32) -> Result<Self, GraphError> {
        let mut next = self.clone();
        next.add_boost(u)?;
        Ok(next)
    }

    pub fn graph(&self) -> &'g DirectedGraph<T> {
        self.base
    }

    pub fn node_count(&self) -> usize {
        self.base.node_count()
    }

    pub fn spec(&self) -> BoostSpec<T> {
        self.spec
    }

    pub fn boosted_nodes(&self) -> &[u32] {
        &self.boosted_nodes
    }

    #[inline]
    pub fn is_boosted(&self, u: u32) -> bool {
        self.boosted[u as usize]
    }

    /// Effective probability of an out-edge of `source` whose stored
    /// probability is `raw`.
    #[inline]
    pub fn edge_prob(&self, source: u32, raw: T) -> T {
        if self.boosted[source as usize] {
            boosted_prob(raw, self.spec.b)
        } else {
            raw
        }
    }

    /// Effective delay distribution of `u`.
    #[inline]
    pub fn delay(&self, u: u32) -> &DelayPmf<T> {
        if self.boosted[u as usize] {
            let pmf = self
                .boosted_delays
                .iter()
                .find(|&&(id, _)| id == u)
                .map(|(_, pmf)| pmf);
            pmf.expect("boosted node always has a reshaped delay")
        } else {
            self.base.delay(u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayPmf;

    #[test]
    fn edge_prob_lift_caps_at_one() {
        assert!((boosted_prob(0.25, 0.1) - 0.35f64).abs() < 1e-15);
        assert_eq!(boosted_prob(0.95, 0.1), 1.0);
        assert_eq!(boosted_prob(1.0, 1.0), 1.0);
    }

    #[test]
    fn prop_prob_only_keeps_delays_bit_identical() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.3), (4, 0.4)], 0.3).unwrap();
        let out = boosted_delay(&pmf, 0.2, DelayPolicy::PropProbOnly);
        assert_eq!(pmf, out);
    }

    #[test]
    fn first_tu_shifts_and_rescales() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap();
        let out = boosted_delay(&pmf, 0.1, DelayPolicy::FirstTu);
        assert!((out.mass(1) - 0.6).abs() < 1e-12);
        assert!((out.mass(2) - 0.4).abs() < 1e-12);
        assert!(out.overflow().abs() < 1e-12);
    }

    #[test]
    fn first_tu_saturated_is_identity() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 1.0)], 0.0).unwrap();
        let out = boosted_delay(&pmf, 0.3, DelayPolicy::FirstTu);
        assert_eq!(pmf, out);
    }

    #[test]
    fn second_tu_leaves_first_unit_fixed() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.2), (2, 0.3), (3, 0.3)], 0.2).unwrap();
        let out = boosted_delay(&pmf, 0.1, DelayPolicy::SecondTu);
        assert_eq!(out.mass(1), pmf.mass(1));
        assert!((out.mass(2) - 0.4).abs() < 1e-12);
        // tail beyond t=2 scaled by (0.5 - 0.1) / 0.5
        assert!((out.mass(3) - 0.24).abs() < 1e-12);
        assert!((out.overflow() - 0.16).abs() < 1e-12);
        // dominance
        for t in 0..=4 {
            assert!(out.cdf(t) >= pmf.cdf(t) - 1e-15);
        }
    }

    #[test]
    fn second_tu_extends_short_support() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.6)], 0.4).unwrap();
        let out = boosted_delay(&pmf, 0.1, DelayPolicy::SecondTu);
        assert_eq!(out.mass(1), 0.6);
        assert!((out.mass(2) - 0.1).abs() < 1e-12);
        assert!((out.overflow() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn view_reads_through_for_unboosted_nodes() {
        let delays = vec![DelayPmf::<f64>::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap(); 3];
        let g =
            DirectedGraph::from_weighted_edges(3, &[(0, 1, 0.4), (1, 2, 0.7)], delays).unwrap();
        let spec = BoostSpec::new(0.3, DelayPolicy::FirstTu).unwrap();
        let view = BoostedGraphView::new(&g, &[1], spec).unwrap();
        // unboosted node: base values bit-exactly
        assert_eq!(view.edge_prob(0, 0.4), 0.4);
        assert_eq!(view.delay(0), g.delay(0));
        // boosted node: lifted edge and shifted delay
        assert!((view.edge_prob(1, 0.7) - 1.0).abs() < 1e-15);
        assert!(view.delay(1).cdf(1) > g.delay(1).cdf(1));
        // empty boost set is behaviorally the base
        let empty = BoostedGraphView::new(&g, &[], spec).unwrap();
        assert_eq!(empty.edge_prob(1, 0.7), 0.7);
        assert_eq!(empty.delay(1), g.delay(1));
    }

    #[test]
    fn view_rejects_out_of_range_ids() {
        let g = DirectedGraph::from_weighted_edges(
            2,
            &[(0, 1, 0.5)],
            vec![DelayPmf::deterministic(1); 2],
        )
        .unwrap();
        let spec = BoostSpec::new(0.1, DelayPolicy::PropProbOnly).unwrap();
        assert!(BoostedGraphView::new(&g, &[5], spec).is_err());
    }

    #[test]
    fn latent_edges_materialize_under_full_boost() {
        let g = DirectedGraph::from_weighted_edges_with_latent(
            2,
            &[(0, 1, 0.0)],
            vec![DelayPmf::deterministic(1); 2],
        )
        .unwrap();
        let spec = BoostSpec::new(1.0, DelayPolicy::PropProbOnly).unwrap();
        let view = BoostedGraphView::new(&g, &[0], spec).unwrap();
        assert_eq!(view.edge_prob(0, 0.0), 1.0);
        let bare = BoostedGraphView::unboosted(&g);
        assert_eq!(bare.edge_prob(0, 0.0), 0.0);
    }

    #[test]
    fn policy_names_round_trip() {
        for p in [
            DelayPolicy::PropProbOnly,
            DelayPolicy::FirstTu,
            DelayPolicy::SecondTu,
        ] {
            assert_eq!(p.to_string().parse::<DelayPolicy>().unwrap(), p);
        }
        assert!("1st-tu".parse::<DelayPolicy>().is_err());
    }
}
