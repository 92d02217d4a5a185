//! Monte-Carlo drivers: calibration, power and sparse-vs-complete studies
//! over a grid of configurations, plus residual-analysis tables.

mod config;
mod interval;
mod montecarlo;
mod residuals;

pub use config::{Coupling, EdgeMode, ExperimentConfig, GraphSource};
pub use interval::clopper_pearson;
pub use montecarlo::{
    repetition_seed, run_calibration, run_grid, run_power_sweep, run_sparse_vs_complete,
    CellResult, RejectionReport, REPORT_COLUMNS,
};
pub use residuals::{
    gpvar_optimality_experiment, residual_analysis, GpvarExperimentConfig, GpvarReport,
    PredictorSummary, ResidualRow,
};
