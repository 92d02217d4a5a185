use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::az::{SpatioTemporalParts, TestResult};
use crate::error::{AzError, Result};
use crate::graph::DynamicGraph;
use crate::signal::GraphSignal;

/// Family-wise correction applied across per-feature tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    /// Each feature at level alpha.
    #[default]
    None,
    /// Reject feature `f` iff `p_f < alpha / F`.
    Bonferroni,
    /// Hochberg step-up: with sorted `p_(1) <= ... <= p_(F)`, reject the
    /// hypotheses `1..=k` for the largest `k` with `p_(k) <= alpha / (F - k + 1)`.
    Hochberg,
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correction::None => "none",
            Correction::Bonferroni => "bonferroni",
            Correction::Hochberg => "hochberg",
        })
    }
}

impl FromStr for Correction {
    type Err = AzError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Correction::None),
            "bonferroni" => Ok(Correction::Bonferroni),
            "hochberg" => Ok(Correction::Hochberg),
            _ => Err(AzError::invalid(format!("unknown correction '{s}'"))),
        }
    }
}

/// Per-hypothesis rejection flags under `correction`.
pub fn correct_pvalues(p: &[f64], alpha: f64, correction: Correction) -> Vec<bool> {
    let m = p.len();
    match correction {
        Correction::None => p.iter().map(|&q| q < alpha).collect(),
        Correction::Bonferroni => p.iter().map(|&q| q < alpha / m as f64).collect(),
        Correction::Hochberg => {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
            let cutoff = (1..=m)
                .rev()
                .find(|&k| p[order[k - 1]] <= alpha / (m - k + 1) as f64);
            let mut out = vec![false; m];
            if let Some(k) = cutoff {
                for &i in &order[..k] {
                    out[i] = true;
                }
            }
            out
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerFeatureResult {
    pub results: Vec<TestResult>,
    pub correction: Correction,
    /// Rejection flag per feature after correction.
    pub rejected: Vec<bool>,
    /// Whiteness is rejected for the signal as a whole.
    pub reject: bool,
    pub advisories: Vec<String>,
}

/// Run the scalar AZ test on each feature separately and combine the
/// decisions with a multiple-testing correction.
pub fn per_feature(
    dg: &DynamicGraph,
    x: &GraphSignal,
    lambda: f64,
    alpha: f64,
    w_tm_override: Option<f64>,
    correction: Correction,
) -> Result<PerFeatureResult> {
    let mut advisories = Vec::new();
    if x.dim() == 1 {
        advisories.push("F = 1: per-feature correction is a no-op".to_string());
    }
    let results = (0..x.dim())
        .map(|f| {
            let xf = x.feature(f)?;
            SpatioTemporalParts::compute(dg, &xf, w_tm_override)?.finish(lambda, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = results.iter().map(|r| r.p_value).collect();
    let rejected = correct_pvalues(&p, alpha, correction);
    Ok(PerFeatureResult {
        reject: rejected.iter().any(|&r| r),
        results,
        correction,
        rejected,
        advisories,
    })
}
