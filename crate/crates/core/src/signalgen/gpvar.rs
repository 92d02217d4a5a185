use rand_distr::StandardNormal;
use rand::Rng;

use super::{TAG_GPVAR_INIT, TAG_GPVAR_NOISE};
use crate::error::{AzError, Result};
use crate::graph::WeightedGraph;
use crate::rng::{hash_str, CounterRng};
use crate::signal::GraphSignal;

/// Steps discarded before the first returned observation.
pub const DEFAULT_BURN_IN: usize = 100;

/// Graph shift operator used by the polynomial filter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShiftKind {
    /// `D^-1/2 (I + A) D^-1/2` with `D` the degree matrix of `I + A`.
    #[default]
    NormalizedWithSelfLoops,
    /// The (weighted) adjacency matrix `A`.
    Adjacency,
}

/// GPVAR filter coefficients `theta[l][q-1]` for hop `l = 0..=L` and lag
/// `q = 1..=Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpvarParams {
    theta: Vec<Vec<f64>>,
    pub shift: ShiftKind,
    /// Standard deviation of the Gaussian innovations.
    pub noise_std: f64,
}

impl GpvarParams {
    pub fn new(theta: Vec<Vec<f64>>) -> Result<Self> {
        let q = theta.first().map(Vec::len).unwrap_or(0);
        if q == 0 || theta.iter().any(|row| row.len() != q) {
            return Err(AzError::invalid(
                "theta must be a non-empty (L+1) x Q matrix with equal-length rows",
            ));
        }
        if theta.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AzError::invalid("theta entries must be finite"));
        }
        Ok(Self {
            theta,
            shift: ShiftKind::default(),
            noise_std: 1.0,
        })
    }

    /// `L = Q = 2`, rows `[5, 2], [-4, 6], [-1, 0]` (hop-major).
    pub fn reference() -> Self {
        Self::new(vec![vec![5.0, 2.0], vec![-4.0, 6.0], vec![-1.0, 0.0]]).expect("valid")
    }

    pub fn theta(&self) -> &[Vec<f64>] {
        &self.theta
    }

    /// Spatial order `L`.
    pub fn hops(&self) -> usize {
        self.theta.len() - 1
    }

    /// Temporal order `Q`.
    pub fn lags(&self) -> usize {
        self.theta[0].len()
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            theta: self
                .theta
                .iter()
                .map(|r| r.iter().map(|v| v * factor).collect())
                .collect(),
            shift: self.shift,
            noise_std: self.noise_std,
        }
    }
}

/// Sparse graph shift operator over the node order of its graph.
#[derive(Clone, Debug)]
pub struct ShiftOperator {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: f64,
    scale: Vec<f64>,
}

impl ShiftOperator {
    pub fn new(g: &WeightedGraph, kind: ShiftKind) -> Self {
        let adj = g.symmetrize().in_neighbors();
        match kind {
            ShiftKind::NormalizedWithSelfLoops => {
                let scale = adj
                    .iter()
                    .map(|nb| 1.0 / (1.0 + nb.iter().map(|e| e.1).sum::<f64>()).sqrt())
                    .collect();
                Self { adj, self_weight: 1.0, scale }
            }
            ShiftKind::Adjacency => Self {
                scale: vec![1.0; adj.len()],
                adj,
                self_weight: 0.0,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.adj.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.adj.len())
            .map(|v| {
                let mut acc = self.self_weight * self.scale[v] * x[v];
                for &(u, w) in &self.adj[v] {
                    acc += w * self.scale[u] * x[u];
                }
                self.scale[v] * acc
            })
            .collect()
    }

    /// `[x, S x, ..., S^hops x]`.
    pub fn powers(&self, x: &[f64], hops: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(hops + 1);
        out.push(x.to_vec());
        for l in 1..=hops {
            let next = self.apply(&out[l - 1]);
            out.push(next);
        }
        out
    }
}

/// Noise-free filter output `tanh(sum_q sum_l theta[l][q-1] S^l x[t-q])`.
/// `history[q - 1]` holds the powers of `x[t - q]`.
fn filter_output(params: &GpvarParams, history: &[&Vec<Vec<f64>>]) -> Vec<f64> {
    let n = history[0][0].len();
    (0..n)
        .map(|v| {
            let mut acc = 0.0;
            for (q, powers) in history.iter().enumerate() {
                for (l, p) in powers.iter().enumerate() {
                    acc += params.theta[l][q] * p[v];
                }
            }
            acc.tanh()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GpvarOutput {
    pub signal: GraphSignal,
    /// Additive noise as realised in floating point, `x[t] - tanh(.)`.
    pub noise: GraphSignal,
}

/// Simulate `x[t] = tanh(sum_l sum_q theta[l][q-1] S^l x[t-q]) + eta[t]` on
/// `g` with Gaussian `eta` (standard by default, see
/// [`GpvarParams::noise_std`]).
///
/// The `Q` initial states are standard Gaussian, the next `burn_in` steps
/// are discarded and `horizon` steps are returned. The returned noise is
/// `x[t] - tanh(.)` evaluated in floating point, so that it coincides
/// bit-for-bit with the residual of the optimal predictor.
pub fn gen_gpvar(
    g: &WeightedGraph,
    horizon: usize,
    params: &GpvarParams,
    seed: u64,
    burn_in: usize,
) -> Result<GpvarOutput> {
    let lags = params.lags();
    let hops = params.hops();
    if horizon < lags {
        return Err(AzError::invalid(format!("T={horizon} must be >= Q={lags}")));
    }
    if !(params.noise_std.is_finite() && params.noise_std >= 0.0) {
        return Err(AzError::invalid("noise_std must be finite and >= 0"));
    }
    if g.n_nodes() == 0 {
        return Err(AzError::EmptyGraph("GPVAR needs at least one node".into()));
    }
    let shift = ShiftOperator::new(g, params.shift);
    let rng = CounterRng::new(seed);
    let keys: Vec<u64> = g.nodes().iter().map(|n| hash_str(n.as_str())).collect();

    let total = lags + burn_in + horizon;
    let mut powers: Vec<Vec<Vec<f64>>> = Vec::with_capacity(total);
    let mut signal = GraphSignal::new(1, horizon)?;
    let mut noise = GraphSignal::new(1, horizon)?;
    for n in g.nodes() {
        signal.add_node(n.clone());
        noise.add_node(n.clone());
    }
    for s in 0..total {
        let x: Vec<f64> = if s < lags {
            keys.iter()
                .map(|&k| rng.stream(&[TAG_GPVAR_INIT, k, s as u64]).sample(StandardNormal))
                .collect()
        } else {
            let history: Vec<&Vec<Vec<f64>>> = (1..=lags).map(|q| &powers[s - q]).collect();
            let mean = filter_output(params, &history);
            let x: Vec<f64> = mean
                .iter()
                .zip(&keys)
                .map(|(m, &k)| {
                    let e: f64 = rng.stream(&[TAG_GPVAR_NOISE, k, s as u64]).sample(StandardNormal);
                    m + params.noise_std * e
                })
                .collect();
            if s >= lags + burn_in {
                let t = s - lags - burn_in + 1;
                for (v, (xv, m)) in x.iter().zip(&mean).enumerate() {
                    signal.set(v, t, &[*xv])?;
                    noise.set(v, t, &[xv - m])?;
                }
            }
            x
        };
        powers.push(shift.powers(&x, hops));
    }
    Ok(GpvarOutput { signal, noise })
}

/// One-step predictions of the GPVAR filter with parameters `params`.
///
/// Entries at `t <= Q` lack history and are absent.
pub fn gpvar_optimal_predict(
    g: &WeightedGraph,
    x: &GraphSignal,
    params: &GpvarParams,
) -> Result<GraphSignal> {
    if x.dim() != 1 {
        return Err(AzError::invalid("GPVAR signals are scalar (F = 1)"));
    }
    let lags = params.lags();
    let shift = ShiftOperator::new(g, params.shift);
    let order: Vec<usize> = g
        .nodes()
        .iter()
        .map(|n| {
            x.index_of(n).ok_or_else(|| AzError::MissingSignal { node: n.clone(), t: 1 })
        })
        .collect::<Result<_>>()?;
    let mut powers = Vec::with_capacity(x.horizon());
    for t in 1..=x.horizon() {
        let xt: Vec<f64> = order
            .iter()
            .zip(g.nodes())
            .map(|(&i, n)| {
                x.get(i, t)
                    .map(|v| v[0])
                    .ok_or_else(|| AzError::MissingSignal { node: n.clone(), t })
            })
            .collect::<Result<_>>()?;
        powers.push(shift.powers(&xt, params.hops()));
    }
    let mut pred = GraphSignal::new(1, x.horizon())?;
    for n in g.nodes() {
        pred.add_node(n.clone());
    }
    for t in lags + 1..=x.horizon() {
        let history: Vec<&Vec<Vec<f64>>> = (1..=lags).map(|q| &powers[t - 1 - q]).collect();
        for (v, m) in filter_output(params, &history).into_iter().enumerate() {
            pred.set(v, t, &[m])?;
        }
    }
    Ok(pred)
}

/// Residuals `x[t] - x_hat[t]` for `t = Q+1..=T`, re-indexed to `1..=T-Q`.
pub fn gpvar_residuals(g: &WeightedGraph, x: &GraphSignal, params: &GpvarParams) -> Result<GraphSignal> {
    let lags = params.lags();
    if x.horizon() <= lags {
        return Err(AzError::invalid("no time step has enough history for a prediction"));
    }
    let pred = gpvar_optimal_predict(g, x, params)?;
    let mut res = GraphSignal::new(1, x.horizon() - lags)?;
    for (v, n) in g.nodes().iter().enumerate() {
        let i = x.index_of(n).expect("checked by predictor");
        for t in lags + 1..=x.horizon() {
            let r = x.get(i, t).expect("checked")[0] - pred.get(v, t).expect("predicted")[0];
            res.insert(n.clone(), t - lags, vec![r])?;
        }
    }
    Ok(res)
}
