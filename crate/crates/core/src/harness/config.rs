use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{AzError, Result};
use crate::graph::{generate_graph, GraphSpec, WeightedGraph};
use crate::signalgen::{DistributionSpec, DEFAULT_PRESAMPLE};

/// How the single grid value `c` maps to the two coupling strengths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Coupling {
    /// `c_sp = c_tm = c`.
    #[default]
    Both,
    /// `c_sp = c`, `c_tm = 0`.
    Spatial,
    /// `c_sp = 0`, `c_tm = c`.
    Temporal,
}

impl Coupling {
    pub fn split(self, c: f64) -> (f64, f64) {
        match self {
            Coupling::Both => (c, c),
            Coupling::Spatial => (c, 0.0),
            Coupling::Temporal => (0.0, c),
        }
    }
}

impl FromStr for Coupling {
    type Err = AzError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Coupling::Both),
            "spatial" => Ok(Coupling::Spatial),
            "temporal" => Ok(Coupling::Temporal),
            _ => Err(AzError::invalid(format!(
                "unknown coupling '{s}' (expected both|spatial|temporal)"
            ))),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::Both => "both",
            Coupling::Spatial => "spatial",
            Coupling::Temporal => "temporal",
        })
    }
}

/// Which edges the statistic is computed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeMode {
    /// The graph's own edges.
    Sparse,
    /// Every unordered node pair, weight 1.
    Complete,
}

impl FromStr for EdgeMode {
    type Err = AzError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(EdgeMode::Sparse),
            "complete" => Ok(EdgeMode::Complete),
            _ => Err(AzError::invalid(format!("unknown edge mode '{s}' (expected sparse|complete)"))),
        }
    }
}

impl fmt::Display for EdgeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeMode::Sparse => "sparse",
            EdgeMode::Complete => "complete",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    Generated(GraphSpec),
    /// Undirected static edge list.
    File(PathBuf),
}

impl GraphSource {
    pub fn load(&self, seed: u64) -> Result<WeightedGraph> {
        match self {
            GraphSource::Generated(spec) => generate_graph(*spec, seed),
            GraphSource::File(p) => crate::io::read_graph(p, false),
        }
    }
}

/// One Monte-Carlo study: every combination of distribution, `c`, `T`, `F`
/// (the data cells) crossed with every `lambda` and edge mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Seed of a generated graph; the master seed when absent.
    pub graph_seed: Option<u64>,
    pub horizons: Vec<usize>,
    pub dims: Vec<usize>,
    pub c_grid: Vec<f64>,
    pub coupling: Coupling,
    pub distributions: Vec<DistributionSpec>,
    pub repetitions: usize,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub seed: u64,
    pub edge_modes: Vec<EdgeMode>,
    /// Pre-sample size for the centring offset of asymmetric distributions.
    pub presample: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::Generated(GraphSpec::CommunityLine {
                communities: 5,
                size: 6,
                p_in: 0.8,
            }),
            graph_seed: None,
            horizons: vec![500],
            dims: vec![1],
            c_grid: vec![0.0],
            coupling: Coupling::Both,
            distributions: vec![DistributionSpec::Gaussian],
            repetitions: 100,
            alpha: 0.05,
            lambdas: vec![0.5],
            seed: 0,
            edge_modes: vec![EdgeMode::Sparse],
            presample: DEFAULT_PRESAMPLE,
        }
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| AzError::invalid(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| AzError::invalid(format!("{key}: cannot parse '{v}'")))
}

impl ExperimentConfig {
    /// Parse the flat `key = value` format. Unlisted keys keep their
    /// defaults; `#` starts a comment line.
    ///
    /// Keys: `graph` (e.g. `community:5,6,0.8` or `er:30,0.2`),
    /// `graph_file`, `graph_seed`, `T`, `F`, `c`, `coupling`
    /// (`both|spatial|temporal`), `dist`, `R`, `alpha`, `lambda`, `seed`,
    /// `mode` (`sparse`, `complete` or both), `presample`. Grid keys take
    /// comma-separated lists.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                AzError::invalid(format!("config line {}: expected `key = value`", i + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            let at = |e: AzError| AzError::invalid(format!("config line {}: {e}", i + 1));
            match k {
                "graph" => cfg.graph = GraphSource::Generated(v.parse().map_err(at)?),
                "graph_file" => cfg.graph = GraphSource::File(PathBuf::from(v)),
                "graph_seed" => cfg.graph_seed = Some(one(k, v).map_err(at)?),
                "T" => cfg.horizons = list(k, v).map_err(at)?,
                "F" => cfg.dims = list(k, v).map_err(at)?,
                "c" => cfg.c_grid = list(k, v).map_err(at)?,
                "coupling" => cfg.coupling = v.parse().map_err(at)?,
                "dist" => cfg.distributions = list(k, v).map_err(at)?,
                "R" => cfg.repetitions = one(k, v).map_err(at)?,
                "alpha" => cfg.alpha = one(k, v).map_err(at)?,
                "lambda" => cfg.lambdas = list(k, v).map_err(at)?,
                "seed" => cfg.seed = one(k, v).map_err(at)?,
                "mode" => cfg.edge_modes = list(k, v).map_err(at)?,
                "presample" => cfg.presample = one(k, v).map_err(at)?,
                _ => return Err(at(AzError::invalid(format!("unknown key '{k}'")))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let grids = [
            ("T", self.horizons.is_empty()),
            ("F", self.dims.is_empty()),
            ("c", self.c_grid.is_empty()),
            ("dist", self.distributions.is_empty()),
            ("lambda", self.lambdas.is_empty()),
            ("mode", self.edge_modes.is_empty()),
        ];
        if let Some((k, _)) = grids.iter().find(|(_, empty)| *empty) {
            return Err(AzError::invalid(format!("grid '{k}' must not be empty")));
        }
        if self.repetitions == 0 {
            return Err(AzError::invalid("R must be >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(AzError::invalid(format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(AzError::invalid(format!("lambda must be in [0,1], got {l}")));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(AzError::invalid(format!("c must be >= 0, got {c}")));
        }
        if self.dims.contains(&0) || self.horizons.contains(&0) {
            return Err(AzError::invalid("T and F must be >= 1"));
        }
        if self.c_grid.iter().any(|&c| c > 0.0) && self.horizons.contains(&1) {
            return Err(AzError::invalid("correlated signals need T >= 2"));
        }
        Ok(())
    }

    pub(crate) fn graph_seed(&self) -> u64 {
        self.graph_seed.unwrap_or(self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let cfg = ExperimentConfig::parse(
            "# power study\nT = 100, 500\nc=0,0.08,0.64\ndist = gauss, chi2:1\nR = 20\n\
             mode = sparse,complete\ncoupling = spatial\ngraph = er:10,0.3\nseed = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.horizons, vec![100, 500]);
        assert_eq!(cfg.c_grid, vec![0.0, 0.08, 0.64]);
        assert_eq!(cfg.distributions[1], DistributionSpec::Chi2Shifted(1));
        assert_eq!(cfg.edge_modes, vec![EdgeMode::Sparse, EdgeMode::Complete]);
        assert_eq!(cfg.coupling, Coupling::Spatial);
        assert_eq!(cfg.graph, GraphSource::Generated(GraphSpec::ErdosRenyi { n: 10, p: 0.3 }));
        assert_eq!((cfg.repetitions, cfg.seed), (20, 4));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("R = 0").is_err());
        assert!(ExperimentConfig::parse("T =").is_err());
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("lambda = 1.5").is_err());
        assert!(ExperimentConfig::parse("no equals sign").is_err());
    }
}
