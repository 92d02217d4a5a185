use std::collections::HashSet;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::config::GraphSource;
use super::interval::clopper_pearson;
use crate::error::{AzError, Result};
use crate::graph::{DynamicGraph, GraphSpec, NodeId};
use crate::io::fmt_f64;
use crate::rng::mix;
use crate::signal::GraphSignal;
use crate::signalgen::{gen_gpvar, gpvar_residuals, GpvarParams, DEFAULT_BURN_IN};
use crate::stats::{center_median, median_sign_test, SpatioTemporalParts};

/// One row of a residual table: MAE, median sign test and AZ p-values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub label: String,
    pub mae: f64,
    /// Absent when every residual is exactly zero.
    pub median_p: Option<f64>,
    pub lambdas: Vec<f64>,
    pub az_c: Vec<f64>,
    pub az_p: Vec<f64>,
    pub az_reject: Vec<bool>,
}

impl ResidualRow {
    pub fn write_csv<W: Write>(rows: &[ResidualRow], mut out: W) -> io::Result<()> {
        let Some(first) = rows.first() else {
            return Ok(());
        };
        write!(out, "label,mae,median_p")?;
        for l in &first.lambdas {
            write!(out, ",az_p_lambda={l}")?;
        }
        writeln!(out)?;
        for r in rows {
            let med = r.median_p.map(fmt_f64).unwrap_or_default();
            write!(out, "{},{},{med}", r.label, fmt_f64(r.mae))?;
            for p in &r.az_p {
                write!(out, ",{}", fmt_f64(*p))?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

fn check_nodes(x: &GraphSignal, dg: &DynamicGraph) -> Result<()> {
    let graph_nodes: HashSet<&NodeId> = dg.iter().flat_map(|(_, g)| g.nodes()).collect();
    let mut offenders: Vec<String> = x
        .nodes()
        .iter()
        .filter(|n| !graph_nodes.contains(n))
        .map(|n| format!("{n} (residuals only)"))
        .collect();
    let mut seen = HashSet::new();
    for (_, g) in dg.iter() {
        for n in g.nodes() {
            if x.index_of(n).is_none() && seen.insert(n) {
                offenders.push(format!("{n} (graph only)"));
            }
        }
    }
    if offenders.is_empty() {
        return Ok(());
    }
    let total = offenders.len();
    offenders.truncate(20);
    let more = if total > 20 { format!(" and {} more", total - 20) } else { String::new() };
    Err(AzError::NodeMismatch(format!("{}{more}", offenders.join(", "))))
}

fn analyse(label: String, x: &GraphSignal, dg: &DynamicGraph, lambdas: &[f64], alpha: f64) -> Result<ResidualRow> {
    let median_p = match median_sign_test(x) {
        Ok(p) => Some(p),
        Err(AzError::AllZero) => None,
        Err(e) => return Err(e),
    };
    let parts = SpatioTemporalParts::compute(dg, x, None)?;
    let results = lambdas
        .iter()
        .map(|&l| parts.finish(l, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualRow {
        label,
        mae: x.mean_abs(),
        median_p,
        lambdas: lambdas.to_vec(),
        az_c: results.iter().map(|r| r.c).collect(),
        az_p: results.iter().map(|r| r.p_value).collect(),
        az_reject: results.iter().map(|r| r.reject).collect(),
    })
}

/// The residual table of one model: a row for the raw residuals and a row
/// labelled `<label>-m` for the residuals shifted to zero median.
pub fn residual_analysis(
    label: &str,
    residuals: &GraphSignal,
    graph: &DynamicGraph,
    lambdas: &[f64],
    alpha: f64,
) -> Result<Vec<ResidualRow>> {
    check_nodes(residuals, graph)?;
    let (centred, _) = center_median(residuals)?;
    Ok(vec![
        analyse(label.to_string(), residuals, graph, lambdas, alpha)?,
        analyse(format!("{label}-m"), &centred, graph, lambdas, alpha)?,
    ])
}

/// Repeated GPVAR simulation comparing the optimal predictor with one whose
/// coefficients are all scaled by `perturbation`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpvarExperimentConfig {
    pub graph: GraphSource,
    pub graph_seed: Option<u64>,
    pub horizon: usize,
    pub params: GpvarParams,
    pub perturbation: f64,
    pub repetitions: usize,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub seed: u64,
    pub burn_in: usize,
}

impl Default for GpvarExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::Generated(GraphSpec::CommunityLine {
                communities: 5,
                size: 6,
                p_in: 0.8,
            }),
            graph_seed: None,
            horizon: 3000,
            params: GpvarParams::reference(),
            perturbation: 1.5,
            repetitions: 50,
            alpha: 0.05,
            lambdas: vec![0.0, 0.5, 1.0],
            seed: 0,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

/// Rejection counts of one predictor across repetitions, per lambda.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictorSummary {
    pub label: String,
    pub repetitions: usize,
    pub mean_mae: f64,
    pub lambdas: Vec<f64>,
    pub rejections: Vec<usize>,
    pub rate: Vec<f64>,
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpvarReport {
    /// Residual rows of every repetition, in repetition order.
    pub rows: Vec<(usize, ResidualRow)>,
    pub summaries: Vec<PredictorSummary>,
    /// Whether the optimal-predictor residuals equalled the generated noise
    /// bit-for-bit in every repetition.
    pub residuals_equal_noise: bool,
}

impl GpvarReport {
    pub fn summary(&self, label: &str) -> Option<&PredictorSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

fn bits_equal(res: &GraphSignal, noise: &GraphSignal, lag: usize) -> bool {
    noise.nodes().iter().enumerate().all(|(v, n)| {
        (1..=res.horizon()).all(|t| {
            match (res.get_by_id(n, t), noise.get(v, t + lag)) {
                (Some(a), Some(b)) => a[0].to_bits() == b[0].to_bits(),
                _ => false,
            }
        })
    })
}

pub fn gpvar_optimality_experiment(cfg: &GpvarExperimentConfig) -> Result<GpvarReport> {
    if cfg.repetitions == 0 {
        return Err(AzError::invalid("repetitions must be >= 1"));
    }
    if !(cfg.perturbation.is_finite()) {
        return Err(AzError::invalid("perturbation factor must be finite"));
    }
    let g = cfg.graph.load(cfg.graph_seed.unwrap_or(cfg.seed))?;
    let lags = cfg.params.lags();
    if cfg.horizon <= lags {
        return Err(AzError::invalid(format!("T={} leaves no residuals for Q={lags}", cfg.horizon)));
    }
    let perturbed = cfg.params.scaled(cfg.perturbation);
    let dg = DynamicGraph::replicate(g.clone(), cfg.horizon - lags)?;
    let labels = ["optimal", "optimal-m", "perturbed", "perturbed-m"];

    let per_rep: Vec<(bool, Vec<ResidualRow>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = mix(&[cfg.seed, rep as u64]);
            let out = gen_gpvar(&g, cfg.horizon, &cfg.params, seed, cfg.burn_in)?;
            let opt = gpvar_residuals(&g, &out.signal, &cfg.params)?;
            let pert = gpvar_residuals(&g, &out.signal, &perturbed)?;
            let exact = bits_equal(&opt, &out.noise, lags);
            let mut rows = residual_analysis(labels[0], &opt, &dg, &cfg.lambdas, cfg.alpha)?;
            rows.extend(residual_analysis(labels[2], &pert, &dg, &cfg.lambdas, cfg.alpha)?);
            Ok((exact, rows))
        })
        .collect::<Result<_>>()?;

    let n = cfg.repetitions;
    let summaries = labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let rows: Vec<&ResidualRow> = per_rep.iter().map(|(_, r)| &r[k]).collect();
            let rejections: Vec<usize> = (0..cfg.lambdas.len())
                .map(|li| rows.iter().filter(|r| r.az_reject[li]).count())
                .collect();
            let cis = rejections
                .iter()
                .map(|&r| clopper_pearson(r, n, 0.05))
                .collect::<Result<Vec<_>>>()?;
            Ok(PredictorSummary {
                label: label.to_string(),
                repetitions: n,
                mean_mae: rows.iter().map(|r| r.mae).sum::<f64>() / n as f64,
                lambdas: cfg.lambdas.clone(),
                rate: rejections.iter().map(|&r| r as f64 / n as f64).collect(),
                rejections,
                ci_lo: cis.iter().map(|c| c.0).collect(),
                ci_hi: cis.iter().map(|c| c.1).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let residuals_equal_noise = per_rep.iter().all(|(e, _)| *e);
    let rows = per_rep
        .into_iter()
        .enumerate()
        .flat_map(|(rep, (_, rows))| rows.into_iter().map(move |r| (rep, r)))
        .collect();
    Ok(GpvarReport { rows, summaries, residuals_equal_noise })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn path() -> WeightedGraph {
        WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0)], false).unwrap()
    }

    #[test]
    fn constant_positive_residuals() {
        let mut x = GraphSignal::new(1, 20).unwrap();
        for n in ["a", "b", "c"] {
            for t in 1..=20 {
                x.insert(n.into(), t, vec![0.7]).unwrap();
            }
        }
        let dg = DynamicGraph::replicate(path(), 20).unwrap();
        let rows = residual_analysis("const", &x, &dg, &[0.0, 0.5, 1.0], 0.05).unwrap();
        assert_eq!(rows[0].mae, 0.7);
        assert!(rows[0].median_p.unwrap() < 1e-3);
        assert!(rows[0].az_c.iter().all(|&c| c > 0.0));
        assert!(rows[0].az_reject.iter().all(|&r| r));
        assert_eq!(rows[1].label, "const-m");
        assert_eq!(rows[1].median_p, None);
    }

    #[test]
    fn node_mismatch_lists_offenders() {
        let x = GraphSignal::from_scalars([("a", 1.0), ("b", 2.0), ("zz", 1.0)]).unwrap();
        let dg = DynamicGraph::replicate(path(), 1).unwrap();
        let e = residual_analysis("m", &x, &dg, &[1.0], 0.05).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("zz") && msg.contains('c'), "{msg}");
    }

    #[test]
    fn small_gpvar_experiment() {
        let cfg = GpvarExperimentConfig {
            graph: GraphSource::Generated(GraphSpec::CommunityLine { communities: 2, size: 4, p_in: 0.9 }),
            horizon: 200,
            repetitions: 3,
            burn_in: 10,
            ..Default::default()
        };
        let rep = gpvar_optimality_experiment(&cfg).unwrap();
        assert!(rep.residuals_equal_noise);
        assert_eq!(rep.rows.len(), 12);
        assert_eq!(rep.summaries.len(), 4);
        assert_eq!(rep, gpvar_optimality_experiment(&cfg).unwrap());
    }
}
