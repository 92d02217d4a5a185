use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, AzError>;

#[derive(Debug, thiserror::Error)]
pub enum AzError {
    #[error("edge ({u}, {v}) has invalid weight {w}: weights must be finite and > 0")]
    InvalidWeight { u: NodeId, v: NodeId, w: f64 },

    #[error("no edges: statistic undefined")]
    NoEdges,

    #[error("no temporal edges: the temporal component is undefined")]
    NoTemporalEdges,

    #[error("no spatial edges: the spatial component is undefined")]
    NoSpatialEdges,

    #[error("node {node} has no signal at t={t}")]
    MissingSignal { node: NodeId, t: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("all observations are zero: sign test undefined")]
    AllZero,

    #[error("node sets disagree: {0}")]
    NodeMismatch(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AzError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        AzError::InvalidArgument(msg.into())
    }

    pub fn is_io(&self) -> bool {
        matches!(self, AzError::Io { .. })
    }
}
