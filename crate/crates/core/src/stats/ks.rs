use crate::error::{AzError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov-Smirnov test against a continuous `cdf`, with the
/// asymptotic Kolmogorov p-value (Stephens' small-sample correction).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(AzError::invalid("KS test needs at least one sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let en = n.sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d),
    })
}

/// Kolmogorov survival function `Q(l) = 2 sum (-1)^(j-1) exp(-2 j^2 l^2)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let a = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut prev = 0.0f64;
    for j in 1..=100 {
        let term = sign * 2.0 * (a * (j * j) as f64).exp();
        sum += term;
        if term.abs() <= 1e-12 * prev.abs() || term.abs() <= 1e-300 {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
        prev = term;
    }
    1.0
}
