use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Coupling, EdgeMode, ExperimentConfig};
use super::interval::clopper_pearson;
use crate::error::{AzError, Result};
use crate::graph::{DynamicGraph, WeightedGraph};
use crate::io::fmt_f64;
use crate::rng::{hash_str, mix};
use crate::signalgen::{
    estimate_offset, gen_correlated_with_offset, gen_white, CorrParams, DistributionSpec,
    OFFSET_SEED,
};
use crate::stats::SpatioTemporalParts;

/// Column order of the CSV report.
pub const REPORT_COLUMNS: [&str; 12] = [
    "dist", "c_sp", "c_tm", "T", "F", "lambda", "mode", "R", "rejections", "rate", "ci_lo", "ci_hi",
];

/// Rejection statistics of one configuration point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub dist: String,
    pub c_sp: f64,
    pub c_tm: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "F")]
    pub dim: usize,
    pub lambda: f64,
    pub mode: String,
    #[serde(rename = "R")]
    pub repetitions: usize,
    pub rejections: usize,
    /// `rejections / R`.
    pub rate: f64,
    /// 95% Clopper-Pearson interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_abs_c: f64,
    pub mean_p: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RejectionReport {
    pub cells: Vec<CellResult>,
}

impl RejectionReport {
    /// The first cell matching every given coordinate.
    pub fn find(
        &self,
        dist: DistributionSpec,
        c_sp: f64,
        horizon: usize,
        lambda: f64,
        mode: EdgeMode,
    ) -> Option<&CellResult> {
        let (dist, mode) = (dist.to_string(), mode.to_string());
        self.cells.iter().find(|r| {
            r.dist == dist
                && r.c_sp == c_sp
                && r.horizon == horizon
                && r.lambda == lambda
                && r.mode == mode
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", REPORT_COLUMNS.join(","))?;
        for r in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.dist,
                fmt_f64(r.c_sp),
                fmt_f64(r.c_tm),
                r.horizon,
                r.dim,
                fmt_f64(r.lambda),
                r.mode,
                r.repetitions,
                r.rejections,
                fmt_f64(r.rate),
                fmt_f64(r.ci_lo),
                fmt_f64(r.ci_hi)
            )?;
        }
        out.flush()
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

/// Seed of repetition `rep` of a data cell. Edge mode and lambda are not
/// part of the key, so every mode and lambda sees the same signals.
pub fn repetition_seed(
    master: u64,
    dist: DistributionSpec,
    c_sp: f64,
    c_tm: f64,
    horizon: usize,
    dim: usize,
    rep: usize,
) -> u64 {
    mix(&[
        master,
        hash_str(&dist.to_string()),
        c_sp.to_bits(),
        c_tm.to_bits(),
        horizon as u64,
        dim as u64,
        rep as u64,
    ])
}

/// `(reject, |c|, p)` per `[mode][lambda]`.
type Outcome = Vec<Vec<(bool, f64, f64)>>;

/// Every cell of `cfg`, without checks specific to a study.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<RejectionReport> {
    cfg.validate()?;
    let g = cfg.graph.load(cfg.graph_seed())?;
    if g.n_edges() == 0 {
        return Err(AzError::EmptyGraph("experiment graph has no edges".into()));
    }
    let graphs: Vec<(EdgeMode, WeightedGraph)> = cfg
        .edge_modes
        .iter()
        .map(|&mode| match mode {
            EdgeMode::Sparse => (mode, g.clone()),
            EdgeMode::Complete => (mode, WeightedGraph::complete(g.nodes())),
        })
        .collect();

    let mut report = RejectionReport::default();
    for &dist in &cfg.distributions {
        for &c in &cfg.c_grid {
            let (c_sp, c_tm) = cfg.coupling.split(c);
            let white = c_sp == 0.0 && c_tm == 0.0;
            let m = if white {
                0.0
            } else {
                estimate_offset(dist, c_sp, c_tm, &g, cfg.presample, OFFSET_SEED)?
            };
            for &horizon in &cfg.horizons {
                let dgs: Vec<DynamicGraph> = graphs
                    .iter()
                    .map(|(_, gm)| DynamicGraph::replicate(gm.clone(), horizon))
                    .collect::<Result<_>>()?;
                let signal_graph = DynamicGraph::replicate(g.clone(), horizon)?;
                for &dim in &cfg.dims {
                    let outcomes: Vec<Outcome> = (0..cfg.repetitions)
                        .into_par_iter()
                        .map(|rep| {
                            let seed =
                                repetition_seed(cfg.seed, dist, c_sp, c_tm, horizon, dim, rep);
                            let x = if white {
                                gen_white(&signal_graph, dim, dist, seed)?
                            } else {
                                let p = CorrParams::new(c_sp, c_tm, m)?;
                                gen_correlated_with_offset(&g, horizon, dim, dist, p, seed)?
                            };
                            dgs.iter()
                                .map(|dg| {
                                    let parts = SpatioTemporalParts::compute(dg, &x, None)?;
                                    cfg.lambdas
                                        .iter()
                                        .map(|&l| {
                                            let r = parts.finish(l, cfg.alpha)?;
                                            Ok((r.reject, r.c.abs(), r.p_value))
                                        })
                                        .collect()
                                })
                                .collect()
                        })
                        .collect::<Result<_>>()?;

                    for (mi, (mode, _)) in graphs.iter().enumerate() {
                        for (li, &lambda) in cfg.lambdas.iter().enumerate() {
                            let cell: Vec<_> = outcomes.iter().map(|o| o[mi][li]).collect();
                            let n = cell.len();
                            let k = cell.iter().filter(|o| o.0).count();
                            let (ci_lo, ci_hi) = clopper_pearson(k, n, 0.05)?;
                            report.cells.push(CellResult {
                                dist: dist.to_string(),
                                c_sp,
                                c_tm,
                                horizon,
                                dim,
                                lambda,
                                mode: mode.to_string(),
                                repetitions: n,
                                rejections: k,
                                rate: k as f64 / n as f64,
                                ci_lo,
                                ci_hi,
                                mean_abs_c: cell.iter().map(|o| o.1).sum::<f64>() / n as f64,
                                mean_p: cell.iter().map(|o| o.2).sum::<f64>() / n as f64,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Rejection rates under the null: white signals only.
pub fn run_calibration(cfg: &ExperimentConfig) -> Result<RejectionReport> {
    if cfg.c_grid.iter().any(|&c| c != 0.0) {
        return Err(AzError::invalid("calibration runs need the c grid to be {0}"));
    }
    run_grid(cfg)
}

/// Rejection rates over a grid of coupling strengths.
pub fn run_power_sweep(cfg: &ExperimentConfig) -> Result<RejectionReport> {
    if cfg.c_grid.len() < 2 {
        return Err(AzError::invalid("a power sweep needs at least two values of c"));
    }
    run_grid(cfg)
}

/// The same signals tested on the graph's edges and on the complete graph.
/// Edge modes in `cfg` are replaced by both modes.
pub fn run_sparse_vs_complete(cfg: &ExperimentConfig) -> Result<RejectionReport> {
    if cfg.coupling != Coupling::Spatial {
        return Err(AzError::invalid(
            "sparse-vs-complete compares spatial correlation: set coupling = spatial",
        ));
    }
    let cfg = ExperimentConfig {
        edge_modes: vec![EdgeMode::Sparse, EdgeMode::Complete],
        ..cfg.clone()
    };
    run_grid(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::harness::GraphSource;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            graph: GraphSource::Generated(GraphSpec::CommunityLine { communities: 2, size: 5, p_in: 0.8 }),
            horizons: vec![20],
            repetitions: 12,
            seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn single_repetition_rate_is_zero_or_one() {
        let cfg = ExperimentConfig { repetitions: 1, ..small() };
        let rep = run_calibration(&cfg).unwrap();
        assert!(rep.cells.iter().all(|c| c.rate == 0.0 || c.rate == 1.0));
    }

    #[test]
    fn report_is_deterministic_and_rates_exact() {
        let cfg = ExperimentConfig { lambdas: vec![0.0, 0.5, 1.0], ..small() };
        let a = run_calibration(&cfg).unwrap();
        let b = run_calibration(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 3);
        for c in &a.cells {
            assert_eq!(c.rate, c.rejections as f64 / c.repetitions as f64);
            assert!(c.ci_lo <= c.rate && c.rate <= c.ci_hi);
        }
    }

    #[test]
    fn csv_has_fixed_columns() {
        let rep = run_calibration(&small()).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "dist,c_sp,c_tm,T,F,lambda,mode,R,rejections,rate,ci_lo,ci_hi");
        assert_eq!(lines.next().unwrap().split(',').count(), 12);
    }

    #[test]
    fn study_preconditions() {
        assert!(run_calibration(&ExperimentConfig { c_grid: vec![0.0, 0.1], ..small() }).is_err());
        assert!(run_power_sweep(&small()).is_err());
        assert!(run_sparse_vs_complete(&small()).is_err());
        let paired = run_sparse_vs_complete(&ExperimentConfig {
            coupling: Coupling::Spatial,
            c_grid: vec![0.3],
            ..small()
        })
        .unwrap();
        let modes: Vec<_> = paired.cells.iter().map(|c| c.mode.as_str()).collect();
        assert_eq!(modes, ["sparse", "complete"]);
    }
}
