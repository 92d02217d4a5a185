//! Whiteness testing for spatio-temporal signals on (possibly dynamic,
//! weighted) graphs.
//!
//! The crate is organised around the AZ statistic: a weighted sum of the
//! signs of inner products between signals at adjacent nodes, normalised so
//! that it is asymptotically standard Gaussian when the node signals are
//! mutually independent with null median.
//!
//! - [`graph`]: static/dynamic weighted graphs, validation, K-hop
//!   augmentation, multiplex construction and graph builders.
//! - [`signal`]: the `(node, t) -> R^F` signal container.
//! - [`stats`]: the AZ statistic (static, dynamic, lambda-weighted), Gaussian
//!   p-values, the median sign test and multiple-testing helpers.
//! - [`signalgen`]: seeded white, correlated and GPVAR signal generators.
//! - [`harness`]: Monte-Carlo calibration/power drivers and residual tables.
//! - [`io`]: the TSV/CSV/JSON file formats.

pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod numeric;
pub mod rng;
pub mod signal;
pub mod signalgen;
pub mod stats;

pub use error::{AzError, Result};
pub use graph::{DynamicGraph, MultiplexGraph, NodeId, WeightedGraph};
pub use signal::GraphSignal;
pub use stats::{az_statistic_dynamic, az_statistic_static, TestResult};
