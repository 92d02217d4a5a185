use std::sync::Arc;

use super::{NodeId, WeightedGraph};
use crate::error::{AzError, Result};
use crate::numeric::stable_sum;
use crate::signal::GraphSignal;

/// A sequence of snapshots `G[1], ..., G[T]` over a shared node-id space.
///
/// Snapshots are reference counted so a static graph replicated over `T`
/// steps costs one graph.
#[derive(Clone, Debug)]
pub struct DynamicGraph {
    snapshots: Vec<Arc<WeightedGraph>>,
}

impl DynamicGraph {
    pub fn new(snapshots: Vec<WeightedGraph>) -> Result<Self> {
        Self::from_shared(snapshots.into_iter().map(Arc::new).collect())
    }

    pub fn from_shared(snapshots: Vec<Arc<WeightedGraph>>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(AzError::invalid("dynamic graph needs at least one time step"));
        }
        Ok(Self { snapshots })
    }

    /// The static graph `g` repeated at every `t = 1..=horizon`.
    pub fn replicate(g: WeightedGraph, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(AzError::invalid("horizon T must be >= 1"));
        }
        let g = Arc::new(g);
        Ok(Self {
            snapshots: vec![g; horizon],
        })
    }

    /// Number of time steps `T`.
    pub fn horizon(&self) -> usize {
        self.snapshots.len()
    }

    /// Snapshot at 1-based time `t`.
    pub fn snapshot(&self, t: usize) -> &WeightedGraph {
        &self.snapshots[t - 1]
    }

    /// `(t, snapshot)` pairs with 1-based `t`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &WeightedGraph)> + '_ {
        self.snapshots.iter().enumerate().map(|(i, g)| (i + 1, &**g))
    }

    pub fn is_present(&self, v: &NodeId, t: usize) -> bool {
        t >= 1 && t <= self.horizon() && self.snapshot(t).contains(v)
    }

    /// Add to each snapshot the nodes that carry a signal value at that time
    /// step but are not otherwise declared, so presence follows the data.
    pub fn with_signal_presence(&self, x: &GraphSignal) -> Result<DynamicGraph> {
        if x.horizon() != self.horizon() {
            return Err(AzError::invalid(format!(
                "signal has T={} but graph has T={}",
                x.horizon(),
                self.horizon()
            )));
        }
        let snapshots = self
            .snapshots
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let t = i + 1;
                let extra: Vec<NodeId> = x
                    .nodes()
                    .iter()
                    .enumerate()
                    .filter(|(k, n)| x.get(*k, t).is_some() && !g.contains(n))
                    .map(|(_, n)| n.clone())
                    .collect();
                if extra.is_empty() {
                    g.clone()
                } else {
                    Arc::new(g.with_nodes(extra))
                }
            })
            .collect();
        Ok(DynamicGraph { snapshots })
    }
}

/// A node of the multiplex graph: a node id at a time step.
pub type MultiplexNode = (NodeId, usize);

/// The static graph obtained by stacking the snapshots of a dynamic graph
/// and linking each node to its next occurrence in time.
#[derive(Clone, Debug)]
pub struct MultiplexGraph {
    pub nodes: Vec<MultiplexNode>,
    pub spatial_edges: Vec<(MultiplexNode, MultiplexNode, f64)>,
    pub temporal_edges: Vec<(MultiplexNode, MultiplexNode, f64)>,
    /// Weight carried by every temporal edge; absent when there are none and
    /// no override was given.
    pub w_tm: Option<f64>,
    /// Sum over snapshots of the spatial `W2`.
    pub w2_sp: f64,
    pub directed: bool,
}

/// Temporal edge weight balancing the spatial and temporal variance:
/// `sqrt(w2_sp / n_temporal_edges)`, so that `n_temporal_edges * w_tm^2 = w2_sp`.
pub fn temporal_weight(w2_sp: f64, n_temporal_edges: usize) -> Result<f64> {
    if n_temporal_edges == 0 {
        return Err(AzError::NoTemporalEdges);
    }
    if !(w2_sp.is_finite() && w2_sp > 0.0) {
        return Err(AzError::invalid(format!(
            "spatial W2 must be positive, got {w2_sp}"
        )));
    }
    Ok((w2_sp / n_temporal_edges as f64).sqrt())
}

/// Resolve the temporal weight: the override if given, else the balanced
/// weight; `1` when there are temporal but no spatial edges.
pub(crate) fn resolve_w_tm(
    w2_sp: f64,
    n_temporal_edges: usize,
    w_tm_override: Option<f64>,
) -> Result<Option<f64>> {
    if let Some(w) = w_tm_override {
        if !(w.is_finite() && w > 0.0) {
            return Err(AzError::invalid(format!("temporal weight must be > 0, got {w}")));
        }
        return Ok(Some(w));
    }
    if n_temporal_edges == 0 {
        return Ok(None);
    }
    if w2_sp > 0.0 {
        return temporal_weight(w2_sp, n_temporal_edges).map(Some);
    }
    log::warn!("no spatial edges: temporal edges use unit weight");
    Ok(Some(1.0))
}

/// Stack the snapshots of `dg` into a multiplex graph.
pub fn build_multiplex(dg: &DynamicGraph, w_tm_override: Option<f64>) -> Result<MultiplexGraph> {
    let mut nodes = Vec::new();
    let mut spatial_edges = Vec::new();
    let mut temporal_pairs = Vec::new();
    let mut sq = Vec::new();
    let mut directed = false;
    for (t, g) in dg.iter() {
        directed |= g.is_directed();
        nodes.extend(g.nodes().iter().map(|n| (n.clone(), t)));
        for (u, v, w) in g.edge_triples() {
            spatial_edges.push(((u.clone(), t), (v.clone(), t), w));
        }
        sq.extend(g.pair_weights().iter().map(|e| e.w * e.w));
        if t < dg.horizon() {
            let next = dg.snapshot(t + 1);
            for n in g.nodes() {
                if next.contains(n) {
                    temporal_pairs.push(((n.clone(), t), (n.clone(), t + 1)));
                }
            }
        }
    }
    let w2_sp = stable_sum(&mut sq);
    let w_tm = resolve_w_tm(w2_sp, temporal_pairs.len(), w_tm_override)?;
    let temporal_edges = match w_tm {
        Some(w) => temporal_pairs.into_iter().map(|(a, b)| (a, b, w)).collect(),
        None => Vec::new(),
    };
    Ok(MultiplexGraph {
        nodes,
        spatial_edges,
        temporal_edges,
        w_tm,
        w2_sp,
        directed,
    })
}

fn stacked_id(n: &MultiplexNode) -> NodeId {
    NodeId::from(format!("{}@{}", n.0, n.1))
}

impl MultiplexGraph {
    /// Materialise as a plain static graph with node ids `"{id}@{t}"`.
    pub fn to_static(&self) -> Result<WeightedGraph> {
        let nodes = self.nodes.iter().map(stacked_id);
        let edges = self
            .spatial_edges
            .iter()
            .chain(self.temporal_edges.iter())
            .map(|(a, b, w)| (stacked_id(a), stacked_id(b), *w));
        WeightedGraph::validate(nodes, edges, self.directed).map(|(g, _)| g)
    }

    /// Rearrange `x` onto the stacked nodes (static signal at t = 1).
    pub fn stacked_signal(&self, x: &GraphSignal) -> Result<GraphSignal> {
        let mut out = GraphSignal::new(x.dim(), 1)?;
        for n in &self.nodes {
            if let Some(v) = x.get_by_id(&n.0, n.1) {
                out.insert(stacked_id(n), 1, v.to_vec())?;
            }
        }
        Ok(out)
    }
}
