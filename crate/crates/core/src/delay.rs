//! Discrete activation-delay distributions.

use rand::Rng;
use thiserror::Error;

use crate::scalar::{scalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelayError {
    #[error("delay rate alpha must be positive")]
    NonPositiveAlpha,
    #[error("delay support must cover at least one time unit")]
    EmptySupport,
    #[error("delay support starts at t = 1; the zero-delay point mass is reserved for the virtual seed")]
    ZeroDelaySupport,
    #[error("negative mass at t = {t}")]
    NegativeMass { t: usize },
    #[error("masses plus overflow sum to {total}, expected 1")]
    NotNormalized { total: f64 },
}

/// Probability mass function of a node's activation delay, in whole time
/// units, with the mass beyond the represented window kept as an explicit
/// `overflow` (an overflow draw never lands within any horizon).
///
/// Production distributions have support on `{1..t_max}`; the zero-delay
/// point mass exists only as [`DelayPmf::instant`] for the virtual seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayPmf<T> {
    /// `mass[t]` = P(delay == t); `mass[0]` is nonzero only for `instant`.
    mass: Vec<T>,
    overflow: T,
}

fn norm_tolerance<T: Scalar>() -> T {
    scalar::<T>(1e-12).max(T::epsilon() * scalar(32.0))
}

impl<T: Scalar> DelayPmf<T> {
    fn validated(mass: Vec<T>, overflow: T) -> Result<Self, DelayError> {
        for (t, &m) in mass.iter().enumerate() {
            if m < T::zero() {
                return Err(DelayError::NegativeMass { t });
            }
        }
        if overflow < T::zero() {
            return Err(DelayError::NegativeMass { t: mass.len() });
        }
        let total = mass.iter().copied().sum::<T>() + overflow;
        if (total - T::one()).abs() > norm_tolerance::<T>() {
            return Err(DelayError::NotNormalized {
                total: total.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mass, overflow })
    }

    /// Builds from masses for `t = 1, 2, ..`; `overflow` is the remaining
    /// beyond-window probability.
    pub fn from_masses(masses_from_t1: &[T], overflow: T) -> Result<Self, DelayError> {
        if masses_from_t1.is_empty() {
            return Err(DelayError::EmptySupport);
        }
        let mut mass = Vec::with_capacity(masses_from_t1.len() + 1);
        mass.push(T::zero());
        mass.extend_from_slice(masses_from_t1);
        Self::validated(mass, overflow)
    }

    /// Builds from sparse `(t, mass)` pairs, `t >= 1`.
    pub fn from_pairs(pairs: &[(usize, T)], overflow: T) -> Result<Self, DelayError> {
        let t_max = pairs
            .iter()
            .map(|&(t, _)| t)
            .max()
            .ok_or(DelayError::EmptySupport)?;
        if pairs.iter().any(|&(t, _)| t == 0) {
            return Err(DelayError::ZeroDelaySupport);
        }
        let mut mass = vec![T::zero(); t_max + 1];
        for &(t, p) in pairs {
            mass[t] = mass[t] + p;
        }
        Self::validated(mass, overflow)
    }

    /// Ceiling of an exponential draw with rate `alpha`:
    /// `mass(t) = e^{-alpha (t-1)} - e^{-alpha t}` for `t in {1..t_max}`,
    /// `overflow = e^{-alpha t_max}`. Mass beyond the window is never
    /// renormalized into it.
    pub fn exponential(alpha: T, t_max: usize) -> Result<Self, DelayError> {
        if alpha <= T::zero() {
            return Err(DelayError::NonPositiveAlpha);
        }
        if t_max == 0 {
            return Err(DelayError::EmptySupport);
        }
        let mut mass = vec![T::zero(); t_max + 1];
        for (t, m) in mass.iter_mut().enumerate().skip(1) {
            let t = scalar::<T>(t as f64);
            *m = (-alpha * (t - T::one())).exp() - (-alpha * t).exp();
        }
        let overflow = (-alpha * scalar(t_max as f64)).exp();
        Self::validated(mass, overflow)
    }

    /// Point mass at `t` (`t >= 1`).
    pub fn deterministic(t: usize) -> Self {
        assert!(t >= 1, "deterministic delay must be at least one time unit");
        let mut mass = vec![T::zero(); t + 1];
        mass[t] = T::one();
        Self {
            mass,
            overflow: T::zero(),
        }
    }

    /// Zero-delay point mass; reserved for the virtual seed.
    pub fn instant() -> Self {
        Self {
            mass: vec![T::one()],
            overflow: T::zero(),
        }
    }

    pub fn is_instant(&self) -> bool {
        self.mass[0] > T::zero()
    }

    /// P(delay == t); zero outside the represented window.
    #[inline]
    pub fn mass(&self, t: usize) -> T {
        self.mass.get(t).copied().unwrap_or_else(T::zero)
    }

    /// P(delay <= t).
    pub fn cdf(&self, t: usize) -> T {
        self.mass.iter().take(t + 1).copied().sum()
    }

    /// P(delay beyond the window, i.e. the attempt never lands).
    #[inline]
    pub fn overflow(&self) -> T {
        self.overflow
    }

    /// Largest represented delay.
    pub fn t_max(&self) -> usize {
        self.mass.len() - 1
    }

    /// `(t, mass)` pairs with positive mass, ascending in `t`.
    pub fn support(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m > T::zero())
            .map(|(t, &m)| (t, m))
    }

    /// Number of support points.
    pub fn support_len(&self) -> usize {
        self.support().count()
    }

    /// Smallest delay with positive mass; `None` if all mass overflows.
    pub fn min_delay(&self) -> Option<usize> {
        self.support().next().map(|(t, _)| t)
    }

    /// P(the attempt lands within the window).
    pub fn landing_prob(&self) -> T {
        T::one() - self.overflow
    }

    /// E[delay | the attempt lands]; infinite when nothing ever lands.
    pub fn conditional_mean(&self) -> T {
        let landing = self.landing_prob();
        if landing <= T::zero() {
            return T::infinity();
        }
        let sum: T = self
            .support()
            .map(|(t, m)| scalar::<T>(t as f64) * m)
            .sum();
        sum / landing
    }

    /// Draws a delay; `None` means the attempt never lands.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (t, m) in self.mass.iter().enumerate() {
            cum += m.to_f64().unwrap_or(0.0);
            if u < cum {
                return Some(t);
            }
        }
        None
    }

    pub(crate) fn replace_parts(&self, mass: Vec<T>, overflow: T) -> Self {
        debug_assert!(
            (mass.iter().copied().sum::<T>() + overflow - T::one()).abs()
                <= norm_tolerance::<T>() * scalar(4.0)
        );
        Self { mass, overflow }
    }

    pub(crate) fn raw_mass(&self) -> &[T] {
        &self.mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_ln2_two_units() {
        let pmf = DelayPmf::<f64>::exponential(2.0f64.ln(), 2).unwrap();
        assert!((pmf.mass(1) - 0.5).abs() < 1e-12);
        assert!((pmf.mass(2) - 0.25).abs() < 1e-12);
        assert!((pmf.overflow() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exponential_cdf_identity() {
        // cdf(t) = 1 - e^{-alpha t} for every represented t.
        for &alpha in &[0.05, 0.3, 1.0, 4.0] {
            let pmf = DelayPmf::<f64>::exponential(alpha, 12).unwrap();
            for t in 1..=12 {
                let expect = 1.0 - (-alpha * t as f64).exp();
                assert!(
                    (pmf.cdf(t) - expect).abs() < 1e-12,
                    "alpha={alpha} t={t}"
                );
            }
            let total: f64 = pmf.support().map(|(_, m)| m).sum::<f64>() + pmf.overflow();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_large_alpha_concentrates_at_one() {
        let pmf = DelayPmf::<f64>::exponential(40.0, 5).unwrap();
        assert!(pmf.mass(1) > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            DelayPmf::<f64>::exponential(0.0, 5),
            Err(DelayError::NonPositiveAlpha)
        ));
        assert!(matches!(
            DelayPmf::<f64>::exponential(1.0, 0),
            Err(DelayError::EmptySupport)
        ));
        assert!(matches!(
            DelayPmf::from_pairs(&[(0, 1.0)], 0.0),
            Err(DelayError::ZeroDelaySupport)
        ));
        assert!(matches!(
            DelayPmf::from_masses(&[0.6, 0.6], 0.0),
            Err(DelayError::NotNormalized { .. })
        ));
    }

    #[test]
    fn sampling_matches_masses() {
        let pmf = DelayPmf::from_pairs(&[(1, 0.5), (3, 0.25)], 0.25).unwrap();
        let mut rng = crate::rng::stream(11, 0xdead, 0);
        let mut counts = [0u32; 3]; // t=1, t=3, overflow
        for _ in 0..40_000 {
            match pmf.sample(&mut rng) {
                Some(1) => counts[0] += 1,
                Some(3) => counts[1] += 1,
                None => counts[2] += 1,
                other => panic!("impossible draw {other:?}"),
            }
        }
        assert!((counts[0] as f64 / 40_000.0 - 0.5).abs() < 0.01);
        assert!((counts[1] as f64 / 40_000.0 - 0.25).abs() < 0.01);
        assert!((counts[2] as f64 / 40_000.0 - 0.25).abs() < 0.01);
    }

    #[test]
    fn conditional_mean_and_min_delay() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.25), (2, 0.25)], 0.5).unwrap();
        assert_eq!(pmf.min_delay(), Some(1));
        assert!((pmf.conditional_mean() - 1.5).abs() < 1e-12);
        assert_eq!(DelayPmf::<f64>::instant().min_delay(), Some(0));
        assert_eq!(DelayPmf::<f64>::instant().conditional_mean(), 0.0);
    }
}
