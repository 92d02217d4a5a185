//! Python bindings: `import pyazwhite`.
//!
//! Signals cross the boundary as lists of `(node, t, [f0, f1, ...])`
//! records, graphs as lists of `(u, v, w)` edges.

use std::path::PathBuf;

use azwhite::graph::{generate_graph, graph_from_distances, khop_augment, GraphSpec, HopWeight};
use azwhite::harness::{
    clopper_pearson as cp_interval, residual_analysis as residual_rows, run_calibration,
    run_power_sweep, run_sparse_vs_complete, CellResult, ExperimentConfig, ResidualRow,
};
use azwhite::signalgen::{gen_correlated, gen_gpvar, gen_white, gpvar_residuals, DistributionSpec, GpvarParams};
use azwhite::stats::{center_median as center, median_sign_test};
use azwhite::{io, AzError, DynamicGraph, GraphSignal, NodeId, WeightedGraph};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: AzError) -> PyErr {
    if e.is_io() {
        PyOSError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = AzError>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Weighted graph with string node ids.
#[pyclass(name = "Graph", module = "pyazwhite", frozen)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (edges, directed = false, nodes = None))]
    fn new(edges: Vec<(String, String, f64)>, directed: bool, nodes: Option<Vec<String>>) -> PyResult<Self> {
        let g = WeightedGraph::from_edges(edges.iter().map(|(u, v, w)| (u.as_str(), v.as_str(), *w)), directed)
            .map_err(err)?;
        let inner = match nodes {
            Some(ns) => g.with_nodes(ns.into_iter().map(NodeId::new)),
            None => g,
        };
        Ok(Self { inner })
    }

    /// Random graph from a spec such as `"er:30,0.1"` or `"community:5,6,0.8"`.
    #[staticmethod]
    fn generate(spec: &str, seed: u64) -> PyResult<Self> {
        let spec: GraphSpec = parse(spec)?;
        Ok(Self { inner: generate_graph(spec, seed).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (distances, kappa, directed = true))]
    fn from_distances(distances: Vec<(String, String, f64)>, kappa: f64, directed: bool) -> PyResult<Self> {
        let pairs: Vec<_> = distances.into_iter().map(|(u, v, d)| (NodeId::new(u), NodeId::new(v), d)).collect();
        Ok(Self { inner: graph_from_distances(&pairs, kappa, directed).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (path, directed = false))]
    fn read(path: PathBuf, directed: bool) -> PyResult<Self> {
        Ok(Self { inner: io::read_graph(&path, directed).map_err(err)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        io::write_file(&path, |w| io::write_graph(&self.inner, w)).map_err(err)
    }

    /// Add edges between nodes at hop distance 2..=k.
    #[pyo3(signature = (k, hop_weight = "unit"))]
    fn khop(&self, k: usize, hop_weight: &str) -> PyResult<Self> {
        let rule: HopWeight = parse(hop_weight)?;
        Ok(Self { inner: khop_augment(&self.inner, k, rule).map_err(err)? })
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.as_str().to_owned()).collect()
    }

    fn edges(&self) -> Vec<(String, String, f64)> {
        self.inner
            .edge_triples()
            .map(|(u, v, w)| (u.as_str().to_owned(), v.as_str().to_owned(), w))
            .collect()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.is_directed()
    }

    /// Sum of squared edge weights.
    fn w2(&self) -> PyResult<f64> {
        self.inner.w2().map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.n_nodes()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.n_nodes(), self.inner.n_edges())
    }
}

/// Sequence of graph snapshots at t = 1..T.
#[pyclass(name = "DynamicGraph", module = "pyazwhite", frozen)]
struct PyDynamicGraph {
    inner: DynamicGraph,
}

#[pymethods]
impl PyDynamicGraph {
    #[new]
    fn new(snapshots: Vec<PyRef<'_, PyGraph>>) -> PyResult<Self> {
        let snaps = snapshots.iter().map(|g| g.inner.clone()).collect();
        Ok(Self { inner: DynamicGraph::new(snaps).map_err(err)? })
    }

    /// The same graph at every time step.
    #[staticmethod]
    fn replicate(g: PyRef<'_, PyGraph>, horizon: usize) -> PyResult<Self> {
        Ok(Self { inner: DynamicGraph::replicate(g.inner.clone(), horizon).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (path, presence = None, directed = false, horizon = None))]
    fn read(path: PathBuf, presence: Option<PathBuf>, directed: bool, horizon: Option<usize>) -> PyResult<Self> {
        let inner = io::read_dynamic_graph(&path, presence.as_deref(), directed, horizon).map_err(err)?;
        Ok(Self { inner })
    }

    fn snapshot(&self, t: usize) -> PyResult<PyGraph> {
        if t == 0 || t > self.inner.horizon() {
            return Err(PyValueError::new_err(format!("t must lie in 1..={}", self.inner.horizon())));
        }
        Ok(PyGraph { inner: self.inner.snapshot(t).clone() })
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn __repr__(&self) -> String {
        format!("DynamicGraph(T={})", self.inner.horizon())
    }
}

/// Vector-valued signal indexed by (node, t).
#[pyclass(name = "Signal", module = "pyazwhite", frozen)]
struct PySignal {
    inner: GraphSignal,
}

#[pymethods]
impl PySignal {
    /// Build from `(node, t, values)` records; `dim` and `horizon` are
    /// inferred when omitted.
    #[new]
    #[pyo3(signature = (records, dim = None, horizon = None))]
    fn new(records: Vec<(String, usize, Vec<f64>)>, dim: Option<usize>, horizon: Option<usize>) -> PyResult<Self> {
        let dim = dim.or_else(|| records.first().map(|r| r.2.len())).unwrap_or(1);
        let horizon = horizon.unwrap_or_else(|| records.iter().map(|r| r.1).max().unwrap_or(1));
        let mut x = GraphSignal::new(dim, horizon).map_err(err)?;
        for (n, t, v) in records {
            x.insert(NodeId::new(n), t, v).map_err(err)?;
        }
        Ok(Self { inner: x })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: io::read_signal(&path).map_err(err)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        io::write_file(&path, |w| io::write_signal(&self.inner, w)).map_err(err)
    }

    fn records(&self) -> Vec<(String, usize, Vec<f64>)> {
        self.inner
            .iter()
            .map(|(i, t, v)| (self.inner.nodes()[i].as_str().to_owned(), t, v.to_vec()))
            .collect()
    }

    fn get(&self, node: &str, t: usize) -> Option<Vec<f64>> {
        self.inner.get_by_id(&NodeId::new(node), t).map(<[f64]>::to_vec)
    }

    /// Subtract the per-feature empirical median; returns the centred
    /// signal and the medians.
    fn center_median(&self) -> PyResult<(PySignal, Vec<f64>)> {
        let (x, m) = center(&self.inner).map_err(err)?;
        Ok((PySignal { inner: x }, m))
    }

    /// Two-sided sign test p-value of a zero median.
    fn median_test(&self) -> PyResult<f64> {
        median_sign_test(&self.inner).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn __len__(&self) -> usize {
        self.inner.n_observations()
    }

    fn __eq__(&self, other: PyRef<'_, PySignal>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Signal(F={}, T={}, observations={})",
            self.inner.dim(),
            self.inner.horizon(),
            self.inner.n_observations()
        )
    }
}

#[pyclass(name = "TestResult", module = "pyazwhite", frozen, get_all)]
struct PyTestResult {
    c: f64,
    p_value: f64,
    reject: bool,
    alpha: f64,
    lambda_: f64,
    c_tilde_sp: f64,
    c_tilde_tm: f64,
    w2_sp: f64,
    w2_tm: f64,
    w_tm: Option<f64>,
    n_spatial_edges: usize,
    n_temporal_edges: usize,
    n_zero_signs: usize,
    advisories: Vec<String>,
}

#[pymethods]
impl PyTestResult {
    fn __repr__(&self) -> String {
        format!("TestResult(c={}, p_value={}, reject={})", self.c, self.p_value, self.reject)
    }
}

impl From<azwhite::TestResult> for PyTestResult {
    fn from(r: azwhite::TestResult) -> Self {
        Self {
            c: r.c,
            p_value: r.p_value,
            reject: r.reject,
            alpha: r.alpha,
            lambda_: r.lambda,
            c_tilde_sp: r.c_tilde_sp,
            c_tilde_tm: r.c_tilde_tm,
            w2_sp: r.w2_sp,
            w2_tm: r.w2_tm,
            w_tm: r.w_tm,
            n_spatial_edges: r.n_spatial_edges,
            n_temporal_edges: r.n_temporal_edges,
            n_zero_signs: r.n_zero_signs,
            advisories: r.advisories,
        }
    }
}

/// AZ test of a single-snapshot signal on a static graph.
#[pyfunction]
#[pyo3(signature = (graph, signal, alpha = 0.05))]
fn az_test_static(py: Python<'_>, graph: PyRef<'_, PyGraph>, signal: PyRef<'_, PySignal>, alpha: f64) -> PyResult<PyTestResult> {
    let (g, x) = (&graph.inner, &signal.inner);
    py.detach(|| azwhite::az_statistic_static(g, x, alpha)).map(Into::into).map_err(err)
}

/// Spatio-temporal AZ test. `graph` is a DynamicGraph or a Graph that is
/// replicated over the signal's horizon.
#[pyfunction]
#[pyo3(signature = (graph, signal, lambda_ = 0.5, alpha = 0.05, w_tm = None))]
fn az_test(
    py: Python<'_>,
    graph: &Bound<'_, PyAny>,
    signal: PyRef<'_, PySignal>,
    lambda_: f64,
    alpha: f64,
    w_tm: Option<f64>,
) -> PyResult<PyTestResult> {
    let dg = dynamic_of(graph, signal.inner.horizon())?;
    let x = &signal.inner;
    py.detach(|| azwhite::az_statistic_dynamic(&dg, x, lambda_, alpha, w_tm))
        .map(Into::into)
        .map_err(err)
}

fn dynamic_of(graph: &Bound<'_, PyAny>, horizon: usize) -> PyResult<DynamicGraph> {
    if let Ok(dg) = graph.cast::<PyDynamicGraph>() {
        return Ok(dg.get().inner.clone());
    }
    let g = graph.cast::<PyGraph>()?;
    DynamicGraph::replicate(g.get().inner.clone(), horizon).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (graph, horizon, seed, dim = 1, dist = "gauss"))]
fn generate_white(graph: PyRef<'_, PyGraph>, horizon: usize, seed: u64, dim: usize, dist: &str) -> PyResult<PySignal> {
    let spec: DistributionSpec = parse(dist)?;
    let dg = DynamicGraph::replicate(graph.inner.clone(), horizon).map_err(err)?;
    Ok(PySignal { inner: gen_white(&dg, dim, spec, seed).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (graph, horizon, seed, c_sp = 0.0, c_tm = 0.0, dim = 1, dist = "gauss"))]
#[allow(clippy::too_many_arguments)]
fn generate_correlated(
    py: Python<'_>,
    graph: PyRef<'_, PyGraph>,
    horizon: usize,
    seed: u64,
    c_sp: f64,
    c_tm: f64,
    dim: usize,
    dist: &str,
) -> PyResult<PySignal> {
    let spec: DistributionSpec = parse(dist)?;
    let g = &graph.inner;
    let x = py.detach(|| gen_correlated(g, horizon, dim, spec, c_sp, c_tm, seed)).map_err(err)?;
    Ok(PySignal { inner: x })
}

fn gpvar_params(theta: Option<Vec<Vec<f64>>>, noise_std: f64) -> PyResult<GpvarParams> {
    let mut p = match theta {
        Some(t) => GpvarParams::new(t).map_err(err)?,
        None => GpvarParams::reference(),
    };
    p.noise_std = noise_std;
    Ok(p)
}

/// Simulate the graph polynomial VAR process; returns `(signal, noise)`.
#[pyfunction]
#[pyo3(signature = (graph, horizon, seed, theta = None, burn_in = 100, noise_std = 1.0))]
fn generate_gpvar(
    py: Python<'_>,
    graph: PyRef<'_, PyGraph>,
    horizon: usize,
    seed: u64,
    theta: Option<Vec<Vec<f64>>>,
    burn_in: usize,
    noise_std: f64,
) -> PyResult<(PySignal, PySignal)> {
    let params = gpvar_params(theta, noise_std)?;
    let g = &graph.inner;
    let out = py.detach(|| gen_gpvar(g, horizon, &params, seed, burn_in)).map_err(err)?;
    Ok((PySignal { inner: out.signal }, PySignal { inner: out.noise }))
}

/// One-step residuals of the optimal GPVAR predictor, re-indexed from t = 1.
#[pyfunction]
#[pyo3(signature = (graph, signal, theta = None))]
fn gpvar_predictor_residuals(
    graph: PyRef<'_, PyGraph>,
    signal: PyRef<'_, PySignal>,
    theta: Option<Vec<Vec<f64>>>,
) -> PyResult<PySignal> {
    let params = gpvar_params(theta, 1.0)?;
    Ok(PySignal { inner: gpvar_residuals(&graph.inner, &signal.inner, &params).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (k, n, alpha = 0.05))]
fn clopper_pearson(k: usize, n: usize, alpha: f64) -> PyResult<(f64, f64)> {
    cp_interval(k, n, alpha).map_err(err)
}

fn residual_dict<'py>(py: Python<'py>, r: &ResidualRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("label", &r.label)?;
    d.set_item("mae", r.mae)?;
    d.set_item("median_p", r.median_p)?;
    d.set_item("lambdas", &r.lambdas)?;
    d.set_item("az_c", &r.az_c)?;
    d.set_item("az_p", &r.az_p)?;
    d.set_item("az_reject", &r.az_reject)?;
    Ok(d)
}

/// MAE, median test and AZ tests of a residual signal, raw and
/// median-centred (label suffixed with `-m`).
#[pyfunction]
#[pyo3(signature = (label, residuals, graph, lambdas = vec![0.0, 0.5, 1.0], alpha = 0.05))]
fn residual_analysis<'py>(
    py: Python<'py>,
    label: &str,
    residuals: PyRef<'_, PySignal>,
    graph: &Bound<'py, PyAny>,
    lambdas: Vec<f64>,
    alpha: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let dg = dynamic_of(graph, residuals.inner.horizon())?;
    let x = &residuals.inner;
    let rows = py.detach(|| residual_rows(label, x, &dg, &lambdas, alpha)).map_err(err)?;
    rows.iter().map(|r| residual_dict(py, r)).collect()
}

fn cell_dict<'py>(py: Python<'py>, c: &CellResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("dist", &c.dist)?;
    d.set_item("c_sp", c.c_sp)?;
    d.set_item("c_tm", c.c_tm)?;
    d.set_item("T", c.horizon)?;
    d.set_item("F", c.dim)?;
    d.set_item("lambda", c.lambda)?;
    d.set_item("mode", &c.mode)?;
    d.set_item("R", c.repetitions)?;
    d.set_item("rejections", c.rejections)?;
    d.set_item("rate", c.rate)?;
    d.set_item("ci_lo", c.ci_lo)?;
    d.set_item("ci_hi", c.ci_hi)?;
    d.set_item("mean_abs_c", c.mean_abs_c)?;
    d.set_item("mean_p", c.mean_p)?;
    Ok(d)
}

fn study<'py>(
    py: Python<'py>,
    config: &str,
    seed: u64,
    run: fn(&ExperimentConfig) -> azwhite::Result<azwhite::harness::RejectionReport>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = ExperimentConfig::parse(config).map_err(err)?;
    cfg.seed = seed;
    let report = py.detach(|| run(&cfg)).map_err(err)?;
    report.cells.iter().map(|c| cell_dict(py, c)).collect()
}

/// Rejection rates of white signals. `config` uses the `key = value`
/// format of the command-line tool.
#[pyfunction]
#[pyo3(signature = (config, seed))]
fn calibrate<'py>(py: Python<'py>, config: &str, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    study(py, config, seed, run_calibration)
}

#[pyfunction]
#[pyo3(signature = (config, seed))]
fn power_sweep<'py>(py: Python<'py>, config: &str, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    study(py, config, seed, run_power_sweep)
}

#[pyfunction]
#[pyo3(signature = (config, seed))]
fn compare_sparsity<'py>(py: Python<'py>, config: &str, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    study(py, config, seed, run_sparse_vs_complete)
}

#[pymodule]
fn pyazwhite(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyDynamicGraph>()?;
    m.add_class::<PySignal>()?;
    m.add_class::<PyTestResult>()?;
    m.add_function(wrap_pyfunction!(az_test_static, m)?)?;
    m.add_function(wrap_pyfunction!(az_test, m)?)?;
    m.add_function(wrap_pyfunction!(generate_white, m)?)?;
    m.add_function(wrap_pyfunction!(generate_correlated, m)?)?;
    m.add_function(wrap_pyfunction!(generate_gpvar, m)?)?;
    m.add_function(wrap_pyfunction!(gpvar_predictor_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(clopper_pearson, m)?)?;
    m.add_function(wrap_pyfunction!(residual_analysis, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(power_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(compare_sparsity, m)?)?;
    Ok(())
}
