use statrs::function::beta::inv_beta_reg;

use crate::error::{AzError, Result};

/// Clopper-Pearson interval for `k` successes out of `n` trials at
/// confidence `1 - alpha`.
pub fn clopper_pearson(k: usize, n: usize, alpha: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(AzError::invalid(format!("need 0 <= k <= n, n >= 1 (k={k}, n={n})")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AzError::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 { 0.0 } else { inv_beta_reg(kf, nf - kf + 1.0, alpha / 2.0) };
    let hi = if k == n { 1.0 } else { inv_beta_reg(kf + 1.0, nf - kf, 1.0 - alpha / 2.0) };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_quantiles() {
        // beta quantiles from an independent implementation
        let cases = [
            (10, 200, 0.02423416547210855, 0.09002753770135137),
            (0, 100, 0.0, 0.03621669264517641),
            (100, 100, 0.9637833073548235, 1.0),
            (1, 1, 0.025, 1.0),
            (0, 1, 0.0, 0.975),
            (50, 100, 0.39832112950330106, 0.6016788704966989),
        ];
        for (k, n, lo, hi) in cases {
            let (a, b) = clopper_pearson(k, n, 0.05).unwrap();
            assert!((a - lo).abs() < 1e-9, "{k}/{n}: {a} vs {lo}");
            assert!((b - hi).abs() < 1e-9, "{k}/{n}: {b} vs {hi}");
        }
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(clopper_pearson(3, 2, 0.05).is_err());
        assert!(clopper_pearson(0, 0, 0.05).is_err());
    }
}
