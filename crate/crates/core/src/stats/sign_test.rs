use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{AzError, Result};
use crate::numeric::median;
use crate::signal::GraphSignal;

/// Exact two-sided binomial test of `P(positive) = 1/2` from sign counts.
///
/// The p-value doubles the smaller tail and is clamped to 1.
pub fn sign_test_counts(positive: u64, negative: u64) -> Result<f64> {
    let n = positive + negative;
    if n == 0 {
        return Err(AzError::AllZero);
    }
    let k = positive.min(negative);
    let tail = Binomial::new(0.5, n)
        .map_err(|e| AzError::invalid(e.to_string()))?
        .cdf(k);
    Ok((2.0 * tail).min(1.0))
}

/// Median sign test over every scalar entry of `x` (all features pooled;
/// use [`GraphSignal::feature`] for per-feature tests). Exact zeros are
/// excluded from the count.
pub fn median_sign_test(x: &GraphSignal) -> Result<f64> {
    let (mut pos, mut neg) = (0u64, 0u64);
    for (_, _, v) in x.iter() {
        for &s in v {
            if s > 0.0 {
                pos += 1;
            } else if s < 0.0 {
                neg += 1;
            }
        }
    }
    sign_test_counts(pos, neg)
}

/// Subtract the per-feature empirical median of all observations.
///
/// Returns the centred signal and the subtracted offsets (one per feature).
/// An empty signal is returned unchanged with zero offsets.
pub fn center_median(x: &GraphSignal) -> Result<(GraphSignal, Vec<f64>)> {
    let offsets: Vec<f64> = (0..x.dim())
        .map(|f| median(&mut x.feature_values(f)).unwrap_or(0.0))
        .collect();
    let centred = x.map_values(x.dim(), |v| v.iter().zip(&offsets).map(|(a, m)| a - m).collect())?;
    Ok((centred, offsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: exact two-sided tail by direct summation of
    // binomial coefficients.
    fn oracle(pos: u64, neg: u64) -> f64 {
        let n = pos + neg;
        let k = pos.min(neg);
        let mut coef = 1.0f64;
        let mut tail = 0.0f64;
        for i in 0..=k {
            if i > 0 {
                coef *= (n - i + 1) as f64 / i as f64;
            }
            tail += coef;
        }
        (2.0 * tail / 2f64.powi(n as i32)).min(1.0)
    }

    #[test]
    fn balanced_counts() {
        assert_eq!(sign_test_counts(50, 50).unwrap(), 1.0);
    }

    #[test]
    fn all_positive() {
        let p = sign_test_counts(100, 0).unwrap();
        assert!(p < 1e-29);
        assert!((p / 1.5777218104420236e-30 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sixty_of_hundred() {
        let p = sign_test_counts(60, 40).unwrap();
        assert!((p - 0.05688793364098079).abs() < 1e-12);
        assert!((p - oracle(60, 40)).abs() < 1e-12);
    }

    #[test]
    fn matches_summation_oracle() {
        for &(a, b) in &[(1, 0), (3, 7), (12, 5), (30, 31), (0, 17), (44, 56)] {
            let p = sign_test_counts(a, b).unwrap();
            assert!((p - oracle(a, b)).abs() < 1e-12, "({a},{b}): {p}");
        }
    }

    #[test]
    fn zeros_are_excluded() {
        let x = GraphSignal::from_scalars([("a", 0.0), ("b", 1.0), ("c", -1.0), ("d", 0.0)]).unwrap();
        assert_eq!(median_sign_test(&x).unwrap(), 1.0);
        let z = GraphSignal::from_scalars([("a", 0.0), ("b", 0.0)]).unwrap();
        assert!(matches!(median_sign_test(&z), Err(AzError::AllZero)));
    }

    #[test]
    fn centring() {
        let x = GraphSignal::from_scalars([("a", 5.0), ("b", 5.0)]).unwrap();
        let (c, m) = center_median(&x).unwrap();
        assert_eq!(m, vec![5.0]);
        assert_eq!(c.feature_values(0), vec![0.0, 0.0]);

        let x = GraphSignal::from_scalars([("a", 1.0), ("b", 2.0), ("c", 3.0)]).unwrap();
        let (c, m) = center_median(&x).unwrap();
        assert_eq!(m, vec![2.0]);
        assert_eq!(c.feature_values(0), vec![-1.0, 0.0, 1.0]);

        let x = GraphSignal::from_scalars([("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]).unwrap();
        assert_eq!(center_median(&x).unwrap().1, vec![2.5]);
    }
}
