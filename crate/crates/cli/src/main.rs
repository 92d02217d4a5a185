//! `azw`: AZ whiteness test, signal generators and Monte-Carlo studies.
//!
//! Machine-readable results go to stdout (or `--out`), logs to stderr.
//! Exit codes: 0 success, 1 validation or parse error, 2 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use azwhite::graph::{generate_graph, graph_from_distances, khop_augment, GraphSpec, HopWeight};
use azwhite::harness::{
    gpvar_optimality_experiment, residual_analysis, run_calibration, run_power_sweep,
    run_sparse_vs_complete, ExperimentConfig, GpvarExperimentConfig, GraphSource, RejectionReport,
    ResidualRow,
};
use azwhite::io;
use azwhite::signalgen::{gen_correlated, gen_gpvar, gen_white, DistributionSpec, GpvarParams};
use azwhite::stats::{center_median, per_feature, Correction};
use azwhite::{az_statistic_dynamic, AzError, DynamicGraph, GraphSignal, WeightedGraph};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "azw", version, about = "AZ whiteness test for signals on graphs")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the AZ test on a graph and a signal file; prints the result JSON.
    Test(TestArgs),
    /// Generate a synthetic signal.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Rejection rates over a grid of coupling strengths.
    Power(StudyArgs),
    /// Rejection rates of white signals.
    Calibrate(StudyArgs),
    /// Same signals tested on the sparse and on the complete graph.
    CompareSparsity(StudyArgs),
    /// Residual-analysis table (MAE, median test, AZ p-values).
    Residuals(ResidualArgs),
    /// Graph construction utilities; write a `u<TAB>v<TAB>w` edge list.
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Args)]
struct GraphInput {
    /// Edge list: `u<TAB>v[<TAB>w]`, or `t<TAB>u<TAB>v<TAB>w` with --dynamic.
    #[arg(long)]
    graph: PathBuf,
    /// The graph file has a leading time column.
    #[arg(long)]
    dynamic: bool,
    /// Node-presence file `t<TAB>v` for a dynamic graph.
    #[arg(long, requires = "dynamic")]
    presence: Option<PathBuf>,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
    /// Add edges between nodes at shortest-path distance 2..=K.
    #[arg(long, default_value_t = 1)]
    khop: usize,
    /// Weight of K-hop edges.
    #[arg(long, default_value = "unit")]
    hop_weight: HopWeight,
}

impl GraphInput {
    fn load(&self, horizon: usize) -> azwhite::Result<DynamicGraph> {
        let dg = if self.dynamic {
            io::read_dynamic_graph(&self.graph, self.presence.as_deref(), self.directed, Some(horizon))?
        } else {
            DynamicGraph::replicate(io::read_graph(&self.graph, self.directed)?, horizon)?
        };
        if self.khop == 1 {
            return Ok(dg);
        }
        let snaps = dg
            .iter()
            .map(|(_, g)| khop_augment(g, self.khop, self.hop_weight))
            .collect::<azwhite::Result<Vec<_>>>()?;
        DynamicGraph::new(snaps)
    }
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Signal CSV `t,node,f0[,f1,...]`.
    #[arg(long)]
    signal: PathBuf,
    /// Weight of the spatial part (1 = spatial only, 0 = temporal only).
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Fixed temporal edge weight instead of the balanced one.
    #[arg(long)]
    w_tm: Option<f64>,
    /// Subtract the per-feature empirical median first.
    #[arg(long)]
    center_median: bool,
    /// Separate scalar test per feature.
    #[arg(long)]
    per_feature: bool,
    /// Multiple-testing correction for --per-feature.
    #[arg(long, default_value = "none", requires = "per_feature")]
    correction: Correction,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenGraph {
    /// Static edge list to generate on.
    #[arg(long, conflicts_with = "graph_spec")]
    graph: Option<PathBuf>,
    /// Generated graph, e.g. `community:5,6,0.8` or `er:30,0.1`.
    #[arg(long, default_value = "community:5,6,0.8")]
    graph_spec: GraphSpec,
    /// Seed of the generated graph (defaults to --seed).
    #[arg(long)]
    graph_seed: Option<u64>,
}

impl GenGraph {
    fn load(&self, seed: u64) -> azwhite::Result<WeightedGraph> {
        match &self.graph {
            Some(p) => io::read_graph(p, false),
            None => generate_graph(self.graph_spec, self.graph_seed.unwrap_or(seed)),
        }
    }
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Independent draws at every (node, t).
    White {
        #[command(flatten)]
        graph: GenGraph,
        #[arg(long)]
        seed: u64,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long = "F", default_value_t = 1)]
        dim: usize,
        /// gauss, chi2:<d>, gaussmix, chi2mix or unifmix.
        #[arg(long, default_value = "gauss")]
        dist: DistributionSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spatially and temporally coupled signal.
    Correlated {
        #[command(flatten)]
        graph: GenGraph,
        #[arg(long)]
        seed: u64,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long = "F", default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "gauss")]
        dist: DistributionSpec,
        #[arg(long, default_value_t = 0.0)]
        c_sp: f64,
        #[arg(long, default_value_t = 0.0)]
        c_tm: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph polynomial VAR process; `--out x.csv` also writes `x.noise.csv`.
    Gpvar {
        #[command(flatten)]
        graph: GenGraph,
        #[arg(long)]
        seed: u64,
        #[arg(long = "T")]
        horizon: usize,
        /// Coefficients, rows l = 0..L separated by `;`, lags by `,`.
        #[arg(long, default_value = "5,2;-4,6;-1,0")]
        theta: String,
        #[arg(long, default_value_t = 100)]
        burn_in: usize,
        #[arg(long, default_value_t = 1.0)]
        noise_std: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct StudyArgs {
    /// Flat `key = value` experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResidualArgs {
    /// Edge list the residuals live on.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    dynamic: bool,
    #[arg(long)]
    directed: bool,
    /// Residual CSV files, one table block each.
    #[arg(long, num_args = 1..)]
    residuals: Vec<PathBuf>,
    /// Row labels (default: file stems).
    #[arg(long, num_args = 1..)]
    label: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Instead of reading residuals, simulate GPVAR data and compare the
    /// optimal with a perturbed predictor.
    #[arg(long, conflicts_with = "residuals")]
    simulate_gpvar: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "T", default_value_t = 3000)]
    horizon: usize,
    #[arg(long = "R", default_value_t = 50)]
    repetitions: usize,
    /// Factor applied to every coefficient of the perturbed predictor.
    #[arg(long, default_value_t = 1.5)]
    perturbation: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Random graph from a spec such as `er:30,0.1` or `community:5,6,0.8`.
    Generate {
        #[arg(long)]
        spec: GraphSpec,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gaussian-kernel graph from a `u<TAB>v<TAB>delta` file.
    FromDistances {
        #[arg(long)]
        distances: PathBuf,
        /// Distances in (0, kappa) become edges.
        #[arg(long)]
        kappa: f64,
        /// Merge (u,v) and (v,u) into one undirected edge.
        #[arg(long)]
        undirected: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add K-hop edges to an undirected edge list.
    Khop {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "unit")]
        hop_weight: HopWeight,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Write through `f` to `out`, or to stdout.
fn emit<F>(out: Option<&Path>, f: F) -> azwhite::Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match out {
        Some(p) => io::write_file(p, |w| f(w)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|source| AzError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn emit_json(out: Option<&Path>, json: String) -> azwhite::Result<()> {
    emit(out, |w| writeln!(w, "{json}"))
}

fn run_test(a: &TestArgs) -> azwhite::Result<()> {
    let mut x = io::read_signal(&a.signal)?;
    if a.center_median {
        let (centred, offsets) = center_median(&x)?;
        log::info!("subtracted per-feature medians {offsets:?}");
        x = centred;
    }
    let dg = a.graph.load(x.horizon())?;
    if a.per_feature {
        let r = per_feature(&dg, &x, a.lambda, a.alpha, a.w_tm, a.correction)?;
        for adv in r.advisories.iter().chain(r.results.iter().flat_map(|t| &t.advisories)) {
            log::warn!("{adv}");
        }
        return emit_json(a.out.as_deref(), io::to_json(&r));
    }
    let r = az_statistic_dynamic(&dg, &x, a.lambda, a.alpha, a.w_tm)?;
    for adv in &r.advisories {
        log::warn!("{adv}");
    }
    emit_json(a.out.as_deref(), io::to_json(&r))
}

fn write_signal_to(out: Option<&Path>, x: &GraphSignal) -> azwhite::Result<()> {
    emit(out, |w| io::write_signal(x, w))
}

fn parse_theta(s: &str) -> azwhite::Result<GpvarParams> {
    let rows = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| AzError::invalid(format!("theta: cannot parse '{v}'")))
                })
                .collect::<azwhite::Result<Vec<_>>>()
        })
        .collect::<azwhite::Result<Vec<_>>>()?;
    GpvarParams::new(rows)
}

fn noise_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.noise.csv"))
}

fn run_generate(cmd: &GenerateCmd) -> azwhite::Result<()> {
    match cmd {
        GenerateCmd::White { graph, seed, horizon, dim, dist, out } => {
            let g = graph.load(*seed)?;
            let dg = DynamicGraph::replicate(g, *horizon)?;
            write_signal_to(out.as_deref(), &gen_white(&dg, *dim, *dist, *seed)?)
        }
        GenerateCmd::Correlated { graph, seed, horizon, dim, dist, c_sp, c_tm, out } => {
            let g = graph.load(*seed)?;
            let x = gen_correlated(&g, *horizon, *dim, *dist, *c_sp, *c_tm, *seed)?;
            write_signal_to(out.as_deref(), &x)
        }
        GenerateCmd::Gpvar { graph, seed, horizon, theta, burn_in, noise_std, out } => {
            let g = graph.load(*seed)?;
            let mut params = parse_theta(theta)?;
            params.noise_std = *noise_std;
            let sim = gen_gpvar(&g, *horizon, &params, *seed, *burn_in)?;
            write_signal_to(out.as_deref(), &sim.signal)?;
            if let Some(p) = out {
                let np = noise_path(p);
                io::write_file(&np, |w| io::write_signal(&sim.noise, w))?;
            }
            Ok(())
        }
    }
}

enum Study {
    Power,
    Calibrate,
    Sparsity,
}

fn run_study(kind: Study, a: &StudyArgs) -> azwhite::Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|source| AzError::Io { path: p.clone(), source })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.seed = a.seed;
    let report: RejectionReport = match kind {
        Study::Power => run_power_sweep(&cfg)?,
        Study::Calibrate => run_calibration(&cfg)?,
        Study::Sparsity => run_sparse_vs_complete(&cfg)?,
    };
    match a.format {
        Format::Csv => emit(a.out.as_deref(), |w| report.write_csv(w)),
        Format::Json => emit_json(a.out.as_deref(), report.to_json()),
    }
}

fn run_residuals(a: &ResidualArgs) -> azwhite::Result<()> {
    if a.simulate_gpvar {
        let seed = a
            .seed
            .ok_or_else(|| AzError::invalid("--simulate-gpvar is stochastic: --seed is required"))?;
        let cfg = GpvarExperimentConfig {
            horizon: a.horizon,
            repetitions: a.repetitions,
            perturbation: a.perturbation,
            lambdas: a.lambda.clone(),
            alpha: a.alpha,
            seed,
            graph: match a.graph.clone() {
                Some(p) => GraphSource::File(p),
                None => GpvarExperimentConfig::default().graph,
            },
            ..Default::default()
        };
        let rep = gpvar_optimality_experiment(&cfg)?;
        if !rep.residuals_equal_noise {
            log::warn!("optimal-predictor residuals differ from the generated noise");
        }
        return match a.format {
            Format::Json => emit_json(a.out.as_deref(), rep.to_json()),
            Format::Csv => {
                let rows: Vec<ResidualRow> = rep
                    .rows
                    .iter()
                    .map(|(rep, r)| ResidualRow { label: format!("{}#{rep}", r.label), ..r.clone() })
                    .collect();
                emit(a.out.as_deref(), |w| ResidualRow::write_csv(&rows, w))
            }
        };
    }
    let gpath = a.graph.as_ref().ok_or_else(|| AzError::invalid("--graph is required"))?;
    if a.residuals.is_empty() {
        return Err(AzError::invalid("give --residuals files or --simulate-gpvar"));
    }
    if !a.label.is_empty() && a.label.len() != a.residuals.len() {
        return Err(AzError::invalid("--label needs one entry per residual file"));
    }
    let mut rows = Vec::new();
    for (k, path) in a.residuals.iter().enumerate() {
        let x = io::read_signal(path)?;
        let dg = if a.dynamic {
            io::read_dynamic_graph(gpath, None, a.directed, Some(x.horizon()))?
        } else {
            DynamicGraph::replicate(io::read_graph(gpath, a.directed)?, x.horizon())?
        };
        let label = a.label.get(k).cloned().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        rows.extend(residual_analysis(&label, &x, &dg, &a.lambda, a.alpha)?);
    }
    match a.format {
        Format::Csv => emit(a.out.as_deref(), |w| ResidualRow::write_csv(&rows, w)),
        Format::Json => emit_json(a.out.as_deref(), io::to_json(&rows)),
    }
}

fn run_graph(cmd: &GraphCmd) -> azwhite::Result<()> {
    let (g, out) = match cmd {
        GraphCmd::Generate { spec, seed, out } => (generate_graph(*spec, *seed)?, out),
        GraphCmd::FromDistances { distances, kappa, undirected, out } => {
            let pairs = io::read_distances(distances)?;
            (graph_from_distances(&pairs, *kappa, !undirected)?, out)
        }
        GraphCmd::Khop { graph, k, hop_weight, out } => {
            (khop_augment(&io::read_graph(graph, false)?, *k, *hop_weight)?, out)
        }
    };
    emit(out.as_deref(), |w| io::write_graph(&g, w))
}

fn run(cli: &Cli) -> azwhite::Result<()> {
    match &cli.command {
        Command::Test(a) => run_test(a),
        Command::Generate(c) => run_generate(c),
        Command::Power(a) => run_study(Study::Power, a),
        Command::Calibrate(a) => run_study(Study::Calibrate, a),
        Command::CompareSparsity(a) => run_study(Study::Sparsity, a),
        Command::Residuals(a) => run_residuals(a),
        Command::Graph(c) => run_graph(c),
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("AZW_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("AZW_THREADS must be a non-negative integer, got '{v}'"))?;
    // 0 keeps rayon's default of one thread per core
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    if let Err(e) = init_threads() {
        log::error!("{e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
