use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::normal::gaussian_two_sided_p;
use crate::error::{AzError, Result};
use crate::graph::resolve_w_tm;
use crate::graph::{DynamicGraph, Edge, WeightedGraph};
use crate::numeric::stable_sum;
use crate::signal::GraphSignal;

/// Below this many effective edges the Gaussian approximation is flagged as
/// unreliable (advisory only).
pub const SMALL_SAMPLE_EDGES: usize = 30;

/// Outcome of an AZ test, with the statistic decomposed into its spatial
/// and temporal parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub c_tilde_sp: f64,
    pub c_tilde_tm: f64,
    pub w2_sp: f64,
    pub w2_tm: f64,
    pub lambda: f64,
    pub c: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub n_spatial_edges: usize,
    pub n_temporal_edges: usize,
    pub n_zero_signs: usize,
    pub w_tm: Option<f64>,
    /// Human-readable warnings (small sample, zero inner products, ...).
    #[serde(skip)]
    pub advisories: Vec<String>,
}

/// Sign of `x . y` in `{-1, 0, +1}`.
pub fn sign_product(x: &[f64], y: &[f64]) -> Result<i8> {
    if x.len() != y.len() {
        return Err(AzError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(sign_dot(x, y))
}

#[inline]
fn sign_dot(x: &[f64], y: &[f64]) -> i8 {
    let d: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Weighted sum of edge signs, `sum_(u,v) w_uv sgn(x_u . x_v)`, on the static
/// signal at `t = 1`.
pub fn c_tilde(g: &WeightedGraph, x: &GraphSignal) -> Result<f64> {
    let mut acc = SpatialAcc::default();
    acc.add_snapshot(&SnapshotPlan::new(g, x), g, x, 1)?;
    Ok(stable_sum(&mut acc.terms))
}

/// Edge list of one snapshot resolved against the signal's node indices.
struct SnapshotPlan {
    pairs: Vec<Edge>,
    // graph node index -> signal node index
    to_signal: Vec<Option<usize>>,
}

impl SnapshotPlan {
    fn new(g: &WeightedGraph, x: &GraphSignal) -> Self {
        Self {
            pairs: g.pair_weights(),
            to_signal: g.nodes().iter().map(|n| x.index_of(n)).collect(),
        }
    }
}

#[derive(Default)]
struct SpatialAcc {
    terms: Vec<f64>,
    squares: Vec<f64>,
    n_zero: usize,
}

impl SpatialAcc {
    fn add_snapshot(
        &mut self,
        plan: &SnapshotPlan,
        g: &WeightedGraph,
        x: &GraphSignal,
        t: usize,
    ) -> Result<()> {
        let value = |gi: usize| {
            plan.to_signal[gi]
                .and_then(|si| x.get(si, t))
                .ok_or_else(|| AzError::MissingSignal {
                    node: g.node(gi).clone(),
                    t,
                })
        };
        for e in &plan.pairs {
            let s = sign_dot(value(e.u)?, value(e.v)?);
            if s == 0 {
                self.n_zero += 1;
            }
            self.terms.push(e.w * f64::from(s));
            self.squares.push(e.w * e.w);
        }
        Ok(())
    }
}

/// The four sufficient quantities of the spatio-temporal statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatioTemporalParts {
    pub c_tilde_sp: f64,
    pub c_tilde_tm: f64,
    pub w2_sp: f64,
    pub w2_tm: f64,
    pub n_spatial_edges: usize,
    pub n_temporal_edges: usize,
    pub n_zero_signs: usize,
    pub w_tm: Option<f64>,
}

impl SpatioTemporalParts {
    /// Spatial and temporal sign sums of `x` over the multiplex graph of
    /// `dg`, computed snapshot by snapshot without materialising it.
    ///
    /// A node is present at `t` if the snapshot declares it or the signal
    /// has a value for it; temporal edges join consecutive presences.
    pub fn compute(dg: &DynamicGraph, x: &GraphSignal, w_tm_override: Option<f64>) -> Result<Self> {
        if x.horizon() != dg.horizon() {
            return Err(AzError::invalid(format!(
                "signal has T={} but graph has T={}",
                x.horizon(),
                dg.horizon()
            )));
        }
        let horizon = dg.horizon();

        let mut spatial = SpatialAcc::default();
        let mut plan: Option<(*const WeightedGraph, SnapshotPlan)> = None;
        for (t, g) in dg.iter() {
            let ptr = g as *const WeightedGraph;
            if plan.as_ref().map(|(p, _)| *p != ptr).unwrap_or(true) {
                plan = Some((ptr, SnapshotPlan::new(g, x)));
            }
            let (_, p) = plan.as_ref().expect("plan set above");
            spatial.add_snapshot(p, g, x, t)?;
        }

        let mut tm_sum: i64 = 0;
        let mut n_tm = 0usize;
        let mut n_zero_tm = 0usize;
        let present = |i: usize, t: usize| {
            x.get(i, t).is_some() || dg.snapshot(t).contains(&x.nodes()[i])
        };
        for i in 0..x.nodes().len() {
            let mut prev = present(i, 1);
            for t in 1..horizon {
                let next = present(i, t + 1);
                if prev && next {
                    let missing = |t| AzError::MissingSignal {
                        node: x.nodes()[i].clone(),
                        t,
                    };
                    let a = x.get(i, t).ok_or_else(|| missing(t))?;
                    let b = x.get(i, t + 1).ok_or_else(|| missing(t + 1))?;
                    let s = sign_dot(a, b);
                    if s == 0 {
                        n_zero_tm += 1;
                    }
                    tm_sum += i64::from(s);
                    n_tm += 1;
                }
                prev = next;
            }
        }
        // graph nodes without any signal still form temporal edges
        for t in 1..horizon {
            let next = dg.snapshot(t + 1);
            for n in dg.snapshot(t).nodes() {
                if x.index_of(n).is_none() && next.contains(n) {
                    return Err(AzError::MissingSignal { node: n.clone(), t });
                }
            }
        }

        let c_tilde_sp = stable_sum(&mut spatial.terms);
        let w2_sp = stable_sum(&mut spatial.squares);
        let w_tm = resolve_w_tm(w2_sp, n_tm, w_tm_override)?;
        let (c_tilde_tm, w2_tm) = match w_tm {
            Some(w) if n_tm > 0 => (w * tm_sum as f64, n_tm as f64 * w * w),
            _ => (0.0, 0.0),
        };
        Ok(Self {
            c_tilde_sp,
            c_tilde_tm,
            w2_sp,
            w2_tm,
            n_spatial_edges: spatial.squares.len(),
            n_temporal_edges: n_tm,
            n_zero_signs: spatial.n_zero + n_zero_tm,
            w_tm,
        })
    }

    /// Combine into the lambda-weighted statistic and test at level `alpha`.
    pub fn finish(&self, lambda: f64, alpha: f64) -> Result<TestResult> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(AzError::invalid(format!("lambda must be in [0,1], got {lambda}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(AzError::invalid(format!("alpha must be in (0,1), got {alpha}")));
        }
        if lambda == 1.0 && self.n_spatial_edges == 0 {
            return Err(AzError::NoSpatialEdges);
        }
        if lambda == 0.0 && self.n_temporal_edges == 0 {
            return Err(AzError::NoTemporalEdges);
        }
        let mu = 1.0 - lambda;
        let num = lambda * self.c_tilde_sp + mu * self.c_tilde_tm;
        let var = lambda * lambda * self.w2_sp + mu * mu * self.w2_tm;
        if var <= 0.0 {
            return Err(AzError::NoEdges);
        }
        let c = num / var.sqrt();
        let p_value = gaussian_two_sided_p(c)?;

        let mut advisories = Vec::new();
        let effective = if lambda > 0.0 { self.n_spatial_edges } else { 0 }
            + if lambda < 1.0 { self.n_temporal_edges } else { 0 };
        if effective < SMALL_SAMPLE_EDGES {
            advisories.push(format!(
                "only {effective} effective edges: the Gaussian approximation is asymptotic \
                 and may be inaccurate below {SMALL_SAMPLE_EDGES}"
            ));
        }
        if self.n_zero_signs > 0 {
            advisories.push(format!(
                "{} edge(s) have exactly-zero inner products (zero or orthogonal signals)",
                self.n_zero_signs
            ));
        }
        Ok(TestResult {
            c_tilde_sp: self.c_tilde_sp,
            c_tilde_tm: self.c_tilde_tm,
            w2_sp: self.w2_sp,
            w2_tm: self.w2_tm,
            lambda,
            c,
            p_value,
            alpha,
            reject: p_value < alpha,
            n_spatial_edges: self.n_spatial_edges,
            n_temporal_edges: self.n_temporal_edges,
            n_zero_signs: self.n_zero_signs,
            w_tm: self.w_tm,
            advisories,
        })
    }
}

/// AZ test of a static signal (values at `t = 1`) on a static graph.
pub fn az_statistic_static(g: &WeightedGraph, x: &GraphSignal, alpha: f64) -> Result<TestResult> {
    if g.n_edges() == 0 {
        return Err(AzError::NoEdges);
    }
    if x.horizon() != 1 {
        return Err(AzError::invalid(format!(
            "static test needs a single time step, signal has T={}",
            x.horizon()
        )));
    }
    let dg = DynamicGraph::from_shared(vec![Arc::new(g.clone())])?;
    SpatioTemporalParts::compute(&dg, x, None)?.finish(1.0, alpha)
}

/// AZ test on a dynamic graph with the spatial/temporal mix set by `lambda`
/// (`1` spatial only, `0` temporal only, `1/2` the plain multiplex statistic).
pub fn az_statistic_dynamic(
    dg: &DynamicGraph,
    x: &GraphSignal,
    lambda: f64,
    alpha: f64,
    w_tm_override: Option<f64>,
) -> Result<TestResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(AzError::invalid(format!("lambda must be in [0,1], got {lambda}")));
    }
    SpatioTemporalParts::compute(dg, x, w_tm_override)?.finish(lambda, alpha)
}
