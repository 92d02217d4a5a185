use rayon::prelude::*;

use super::distribution::{DistributionSpec, Sampler};
use super::TAG_ETA;
use crate::error::{AzError, Result};
use crate::graph::{DynamicGraph, NodeId, WeightedGraph};
use crate::numeric::median;
use crate::rng::{hash_str, CounterRng};
use crate::signal::GraphSignal;

/// Pre-sample size used to estimate the centring offset.
pub const DEFAULT_PRESAMPLE: usize = 1_000_000;
/// Auxiliary seed of the offset pre-sample, fixed so that the offset is a
/// function of the process parameters only.
pub const OFFSET_SEED: u64 = 0x0FF5E7;

/// Coupling strengths of the correlated generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrParams {
    pub c_sp: f64,
    pub c_tm: f64,
    pub m: f64,
}

impl CorrParams {
    pub fn new(c_sp: f64, c_tm: f64, m: f64) -> Result<Self> {
        if !(c_sp >= 0.0 && c_sp.is_finite()) || !(c_tm >= 0.0 && c_tm.is_finite()) {
            return Err(AzError::invalid(format!(
                "coupling parameters must be >= 0, got c_sp={c_sp}, c_tm={c_tm}"
            )));
        }
        Ok(Self { c_sp, c_tm, m })
    }
}

/// Innovation `eta_v[t]` (feature `f`) for the node with id hash `node`.
#[inline]
fn eta(rng: &CounterRng, sampler: &Sampler, node: u64, t: usize, f: usize) -> f64 {
    sampler.draw(&mut rng.stream(&[TAG_ETA, node, t as u64, f as u64]))
}

/// Innovations for `nodes` over `1..=horizon`, laid out `[t-1][node][f]`.
fn innovations(
    nodes: &[NodeId],
    horizon: usize,
    dim: usize,
    sampler: &Sampler,
    seed: u64,
) -> Vec<Vec<f64>> {
    let rng = CounterRng::new(seed);
    let keys: Vec<u64> = nodes.iter().map(|n| hash_str(n.as_str())).collect();
    (1..=horizon)
        .into_par_iter()
        .map(|t| {
            let mut row = Vec::with_capacity(keys.len() * dim);
            for &k in &keys {
                for f in 0..dim {
                    row.push(eta(&rng, sampler, k, t, f));
                }
            }
            row
        })
        .collect()
}

/// White graph signal: one independent draw per `(node, t, feature)` for
/// every node present in the snapshot at `t`.
pub fn gen_white(dg: &DynamicGraph, dim: usize, spec: DistributionSpec, seed: u64) -> Result<GraphSignal> {
    let sampler = spec.sampler()?;
    let rng = CounterRng::new(seed);
    let mut x = GraphSignal::new(dim, dg.horizon())?;
    for (t, g) in dg.iter() {
        for n in g.nodes() {
            let k = hash_str(n.as_str());
            let v: Vec<f64> = (0..dim).map(|f| eta(&rng, &sampler, k, t, f)).collect();
            x.insert(n.clone(), t, v)?;
        }
    }
    Ok(x)
}

/// Correlated signal on a static graph:
///
/// `x_v[t] = eta_v[t] + c_tm eta_v[t-1] + c_sp sum_(u->v) w_uv eta_u[t] - m`
///
/// for `t >= 2`, and `x_v[1] = eta_v[1] - m`. Features are independent.
/// The offset `m` is estimated with [`estimate_offset`].
pub fn gen_correlated(
    g: &WeightedGraph,
    horizon: usize,
    dim: usize,
    spec: DistributionSpec,
    c_sp: f64,
    c_tm: f64,
    seed: u64,
) -> Result<GraphSignal> {
    let m = estimate_offset(spec, c_sp, c_tm, g, DEFAULT_PRESAMPLE, OFFSET_SEED)?;
    gen_correlated_with_offset(g, horizon, dim, spec, CorrParams::new(c_sp, c_tm, m)?, seed)
}

/// [`gen_correlated`] with an explicit offset.
pub fn gen_correlated_with_offset(
    g: &WeightedGraph,
    horizon: usize,
    dim: usize,
    spec: DistributionSpec,
    params: CorrParams,
    seed: u64,
) -> Result<GraphSignal> {
    if horizon < 2 {
        return Err(AzError::invalid("correlated generator needs T >= 2"));
    }
    let params = CorrParams::new(params.c_sp, params.c_tm, params.m)?;
    let sampler = spec.sampler()?;
    let eta = innovations(g.nodes(), horizon, dim, &sampler, seed);
    let adj = g.in_neighbors();
    let mut x = GraphSignal::new(dim, horizon)?;
    for n in g.nodes() {
        x.add_node(n.clone());
    }
    let mut buf = vec![0.0; dim];
    for t in 1..=horizon {
        let cur = &eta[t - 1];
        for (v, nbrs) in adj.iter().enumerate() {
            for (f, slot) in buf.iter_mut().enumerate() {
                let own = cur[v * dim + f];
                *slot = if t == 1 {
                    own - params.m
                } else {
                    let prev = eta[t - 2][v * dim + f];
                    let spread: f64 = nbrs.iter().map(|&(u, w)| w * cur[u * dim + f]).sum();
                    own + params.c_tm * prev + params.c_sp * spread - params.m
                };
            }
            x.set(v, t, &buf)?;
        }
    }
    Ok(x)
}

/// Median of the uncentred correlated process (`m = 0`), estimated on a
/// dedicated pre-sample of at least `presample_size` observations.
///
/// Returns exactly 0 without sampling when the innovations are symmetric
/// or when there is no coupling (the process is then the zero-median
/// innovation itself).
pub fn estimate_offset(
    spec: DistributionSpec,
    c_sp: f64,
    c_tm: f64,
    g: &WeightedGraph,
    presample_size: usize,
    seed: u64,
) -> Result<f64> {
    CorrParams::new(c_sp, c_tm, 0.0)?;
    if presample_size < 100_000 {
        return Err(AzError::invalid(format!(
            "pre-sample size must be >= 1e5, got {presample_size}"
        )));
    }
    if spec.is_symmetric() || (c_sp == 0.0 && c_tm == 0.0) {
        return Ok(0.0);
    }
    if g.n_nodes() == 0 {
        return Err(AzError::EmptyGraph("cannot pre-sample on a graph without nodes".into()));
    }
    let steps = presample_size.div_ceil(g.n_nodes()) + 1;
    let x = gen_correlated_with_offset(g, steps, 1, spec, CorrParams::new(c_sp, c_tm, 0.0)?, seed)?;
    // t = 1 follows the boundary rule, not the stationary recurrence
    let mut vals: Vec<f64> = x.iter().filter(|(_, t, _)| *t >= 2).map(|(_, _, v)| v[0]).collect();
    Ok(median(&mut vals).expect("non-empty pre-sample"))
}
