//! Truncated convolution of discrete delay distributions.

use crate::delay::DelayPmf;
use crate::scalar::Scalar;

use super::PathsError;

/// Convolves an arrival-time distribution (indexed `0..=horizon`) with one
/// delay pmf; mass landing past `horizon` is discarded.
pub fn truncated_convolve<T: Scalar>(dist: &[T], pmf: &DelayPmf<T>, horizon: usize) -> Vec<T> {
    let mut out = vec![T::zero(); horizon + 1];
    for (d, m) in pmf.support() {
        if d > horizon {
            break;
        }
        for (s, &q) in dist.iter().enumerate().take(horizon + 1 - d) {
            if q > T::zero() {
                out[s + d] = out[s + d] + q * m;
            }
        }
    }
    out
}

/// Convolves two arrival-time distributions, truncating at `horizon`.
pub fn convolve_dists<T: Scalar>(a: &[T], b: &[T], horizon: usize) -> Vec<T> {
    let mut out = vec![T::zero(); horizon + 1];
    for (i, &x) in a.iter().enumerate().take(horizon + 1) {
        if x <= T::zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(horizon + 1 - i) {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Total probability mass in a truncated distribution.
pub fn total_mass<T: Scalar>(dist: &[T]) -> T {
    dist.iter().copied().sum()
}

/// P(sum of the given delays <= horizon) by iterated truncated convolution.
/// The empty list yields 1.
pub fn path_time_prob<T: Scalar>(delays: &[&DelayPmf<T>], horizon: usize) -> T {
    let mut dist = vec![T::zero(); horizon + 1];
    dist[0] = T::one();
    for pmf in delays {
        dist = truncated_convolve(&dist, pmf, horizon);
    }
    total_mass(&dist)
}

/// Rough approximation of the path-time probability for a path of
/// `path_len` nodes: the cdf of the last interior node's delay at
/// `floor(horizon / (path_len - 1))`. Exact when `path_len == 2`.
pub fn fast_path_time_prob<T: Scalar>(
    last_interior: &DelayPmf<T>,
    path_len: usize,
    horizon: usize,
) -> Result<T, PathsError> {
    if path_len < 2 {
        return Err(PathsError::PathTooShort { len: path_len });
    }
    Ok(last_interior.cdf(horizon / (path_len - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_path_is_certain() {
        assert_eq!(path_time_prob::<f64>(&[], 0), 1.0);
        assert_eq!(path_time_prob::<f64>(&[], 7), 1.0);
    }

    #[test]
    fn deterministic_unit_delay_at_boundary() {
        let pmf = DelayPmf::<f64>::deterministic(1);
        assert_eq!(path_time_prob(&[&pmf], 0), 0.0);
        assert_eq!(path_time_prob(&[&pmf], 1), 1.0);
    }

    #[test]
    fn two_halves_sum_within_three() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap();
        let p = path_time_prob(&[&pmf, &pmf], 3);
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn instant_delay_is_identity_in_convolution() {
        let pmf = DelayPmf::from_pairs(&[(1, 0.3), (3, 0.7)], 0.0).unwrap();
        let instant = DelayPmf::<f64>::instant();
        let p1 = path_time_prob(&[&instant, &pmf], 4);
        let p2 = path_time_prob(&[&pmf], 4);
        assert_eq!(p1, p2);
    }

    #[test]
    fn fast_approximation_values() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.5), (2, 0.5)], 0.0).unwrap();
        assert_eq!(fast_path_time_prob(&pmf, 3, 4).unwrap(), 1.0);
        assert_eq!(fast_path_time_prob(&pmf, 3, 2).unwrap(), 0.5);
        // exact at path_len 2
        assert_eq!(
            fast_path_time_prob(&pmf, 2, 3).unwrap(),
            path_time_prob(&[&pmf], 3)
        );
        assert!(fast_path_time_prob(&pmf, 1, 3).is_err());
    }

    #[test]
    fn overflow_mass_never_arrives() {
        let pmf = DelayPmf::<f64>::from_pairs(&[(1, 0.25)], 0.75).unwrap();
        assert!((path_time_prob(&[&pmf], 10) - 0.25).abs() < 1e-12);
        let p2 = path_time_prob(&[&pmf, &pmf], 10);
        assert!((p2 - 0.0625).abs() < 1e-12);
    }
}
