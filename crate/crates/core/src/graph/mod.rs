//! Graph data model: validated static graphs, dynamic graphs, multiplex
//! stacking and graph builders.

mod build;
mod dynamic;

pub use build::{generate_graph, graph_from_distances, khop_augment, GraphSpec, HopWeight};
pub(crate) use dynamic::resolve_w_tm;
pub use dynamic::{build_multiplex, temporal_weight, DynamicGraph, MultiplexGraph, MultiplexNode};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{AzError, Result};
use crate::numeric::stable_sum;

/// Opaque node identifier, stable across time steps.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(s: impl AsRef<str>) -> Self {
        NodeId(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(Arc::from(s))
    }
}

macro_rules! node_id_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for NodeId {
            fn from(v: $t) -> Self {
                NodeId::from(v.to_string())
            }
        }
    )*};
}
node_id_from_int!(u32, u64, usize, i32, i64);

/// An edge between node indices of its owning [`WeightedGraph`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// What [`WeightedGraph::validate`] had to repair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub self_loops_removed: usize,
    pub duplicates_merged: usize,
}

/// A static graph with strictly positive edge weights, no self-loops and no
/// duplicate edges.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    directed: bool,
}

impl WeightedGraph {
    /// Build a graph from a raw node/edge list.
    ///
    /// Self-loops are stripped and duplicate edges merged by summing their
    /// weights; both repairs are counted in the report and logged. For
    /// undirected graphs `(u,v)` and `(v,u)` are the same edge. The node set
    /// is the union of `nodes` and all edge endpoints, in first-seen order.
    pub fn validate<N, E>(nodes: N, edges: E, directed: bool) -> Result<(Self, ValidationReport)>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut g = WeightedGraph {
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            directed,
        };
        for n in nodes {
            g.intern(n);
        }
        let mut report = ValidationReport::default();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (u, v, w) in edges {
            if !(w.is_finite() && w > 0.0) {
                return Err(AzError::InvalidWeight { u, v, w });
            }
            let iu = g.intern(u);
            let iv = g.intern(v);
            if iu == iv {
                report.self_loops_removed += 1;
                continue;
            }
            let key = if directed { (iu, iv) } else { (iu.min(iv), iu.max(iv)) };
            match seen.get(&key) {
                Some(&pos) => {
                    g.edges[pos].w += w;
                    report.duplicates_merged += 1;
                }
                None => {
                    seen.insert(key, g.edges.len());
                    g.edges.push(Edge { u: iu, v: iv, w });
                }
            }
        }
        if report.self_loops_removed > 0 {
            log::warn!("removed {} self-loop(s)", report.self_loops_removed);
        }
        if report.duplicates_merged > 0 {
            log::warn!(
                "merged {} duplicate edge(s) by summing weights",
                report.duplicates_merged
            );
        }
        Ok((g, report))
    }

    /// Validate an edge list, discarding the repair report.
    pub fn from_edges<E, N>(edges: E, directed: bool) -> Result<Self>
    where
        E: IntoIterator<Item = (N, N, f64)>,
        N: Into<NodeId>,
    {
        let edges: Vec<_> = edges
            .into_iter()
            .map(|(u, v, w)| (u.into(), v.into(), w))
            .collect();
        Self::validate(std::iter::empty(), edges, directed).map(|(g, _)| g)
    }

    /// Unweighted complete graph over `nodes`.
    pub fn complete(nodes: &[NodeId]) -> Self {
        let mut edges = Vec::with_capacity(nodes.len() * nodes.len().saturating_sub(1) / 2);
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                edges.push((nodes[i].clone(), nodes[j].clone(), 1.0));
            }
        }
        Self::validate(nodes.iter().cloned(), edges, false)
            .map(|(g, _)| g)
            .expect("unit weights are valid")
    }

    fn intern(&mut self, n: NodeId) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(n.clone(), i);
        self.nodes.push(n);
        i
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn index_of(&self, n: &NodeId) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.index.contains_key(n)
    }

    pub fn node(&self, i: usize) -> &NodeId {
        &self.nodes[i]
    }

    /// Edges as `(u, v, w)` triples with node ids.
    pub fn edge_triples(&self) -> impl Iterator<Item = (&NodeId, &NodeId, f64)> + '_ {
        self.edges
            .iter()
            .map(move |e| (&self.nodes[e.u], &self.nodes[e.v], e.w))
    }

    /// Unordered node pairs with their total weight `w_uv + w_vu`.
    ///
    /// For an undirected graph this is the edge list itself. Pairs are listed
    /// in the order their first edge appears.
    pub fn pair_weights(&self) -> Vec<Edge> {
        if !self.directed {
            return self.edges.clone();
        }
        let mut pos: HashMap<(usize, usize), usize> = HashMap::with_capacity(self.edges.len());
        let mut pairs: Vec<Edge> = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let key = (e.u.min(e.v), e.u.max(e.v));
            match pos.get(&key) {
                Some(&p) => pairs[p].w += e.w,
                None => {
                    pos.insert(key, pairs.len());
                    pairs.push(*e);
                }
            }
        }
        pairs
    }

    /// Undirected graph with `w~_uv = w_uv + w_vu`. The AZ statistic and `W2`
    /// of the result are identical to those of `self`.
    pub fn symmetrize(&self) -> WeightedGraph {
        WeightedGraph {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            edges: self.pair_weights(),
            directed: false,
        }
    }

    /// `W2 = sum over unordered pairs of (w_uv + w_vu)^2`; for undirected
    /// graphs simply the sum of squared weights.
    pub fn w2(&self) -> Result<f64> {
        if self.edges.is_empty() {
            return Err(AzError::NoEdges);
        }
        Ok(self.w2_or_zero())
    }

    pub(crate) fn w2_or_zero(&self) -> f64 {
        let mut sq: Vec<f64> = self.pair_weights().iter().map(|e| e.w * e.w).collect();
        stable_sum(&mut sq)
    }

    /// Neighbour lists `(neighbour, weight)`. For directed graphs only
    /// incoming edges `u -> v` are listed under `v`.
    pub fn in_neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.v].push((e.u, e.w));
            if !self.directed {
                adj[e.u].push((e.v, e.w));
            }
        }
        adj
    }

    /// Same topology with every weight multiplied by `k > 0`.
    pub fn scale_weights(&self, k: f64) -> Result<WeightedGraph> {
        if !(k.is_finite() && k > 0.0) {
            return Err(AzError::invalid(format!("weight scale must be > 0, got {k}")));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.w *= k;
        }
        Ok(g)
    }

    /// Rename every node through `f`, which must be injective.
    pub fn relabel<F: FnMut(&NodeId) -> NodeId>(&self, mut f: F) -> Result<WeightedGraph> {
        let nodes: Vec<NodeId> = self.nodes.iter().map(&mut f).collect();
        let index: HashMap<NodeId, usize> =
            nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        if index.len() != nodes.len() {
            return Err(AzError::invalid("relabelling is not injective"));
        }
        Ok(WeightedGraph {
            nodes,
            index,
            edges: self.edges.clone(),
            directed: self.directed,
        })
    }

    /// Copy of the graph with extra isolated nodes.
    pub fn with_nodes<I: IntoIterator<Item = NodeId>>(&self, extra: I) -> WeightedGraph {
        let mut g = self.clone();
        for n in extra {
            g.intern(n);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::from(s)
    }

    #[test]
    fn self_loop_stripped() {
        let (g, rep) = WeightedGraph::validate(
            [],
            [(n("1"), n("1"), 1.0), (n("1"), n("2"), 1.0)],
            false,
        )
        .unwrap();
        assert_eq!(rep.self_loops_removed, 1);
        assert_eq!(g.n_edges(), 1);
        let (u, v, w) = g.edge_triples().next().unwrap();
        assert_eq!((u.as_str(), v.as_str(), w), ("1", "2", 1.0));
    }

    #[test]
    fn duplicates_merged_by_sum() {
        let (g, rep) = WeightedGraph::validate(
            [],
            [(n("1"), n("2"), 0.5), (n("1"), n("2"), 0.25)],
            true,
        )
        .unwrap();
        assert_eq!(rep.duplicates_merged, 1);
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edges()[0].w, 0.75);
    }

    #[test]
    fn undirected_reverse_duplicate_is_merged() {
        let g = WeightedGraph::from_edges([("a", "b", 1.0), ("b", "a", 2.0)], false).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edges()[0].w, 3.0);
    }

    #[test]
    fn negative_weight_names_edge() {
        let err = WeightedGraph::from_edges([("1", "2", -1.0)], false).unwrap_err();
        match err {
            AzError::InvalidWeight { u, v, .. } => {
                assert_eq!((u.as_str(), v.as_str()), ("1", "2"))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(WeightedGraph::from_edges([("1", "2", 0.0)], false).is_err());
        assert!(WeightedGraph::from_edges([("1", "2", f64::NAN)], false).is_err());
    }

    #[test]
    fn declared_nodes_kept() {
        let (g, _) =
            WeightedGraph::validate([n("z")], [(n("1"), n("2"), 1.0)], false).unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert!(g.contains(&n("z")));
    }

    #[test]
    fn symmetrize_cases() {
        let g = WeightedGraph::from_edges([("1", "2", 1.0), ("2", "1", 2.0)], true).unwrap();
        let s = g.symmetrize();
        assert!(!s.is_directed());
        assert_eq!(s.n_edges(), 1);
        assert_eq!(s.edges()[0].w, 3.0);

        let g = WeightedGraph::from_edges([("1", "2", 1.0)], true).unwrap();
        assert_eq!(g.symmetrize().edges()[0].w, 1.0);

        let empty = WeightedGraph::from_edges(Vec::<(&str, &str, f64)>::new(), true).unwrap();
        assert_eq!(empty.symmetrize().n_edges(), 0);
    }

    #[test]
    fn w2_cases() {
        let g = WeightedGraph::from_edges([("1", "2", 1.0), ("2", "3", 1.0)], false).unwrap();
        assert_eq!(g.w2().unwrap(), 2.0);
        let g = WeightedGraph::from_edges([("1", "2", 1.0), ("2", "1", 2.0)], true).unwrap();
        assert_eq!(g.w2().unwrap(), 9.0);
        let g = WeightedGraph::from_edges([("1", "2", 2.0), ("2", "3", 0.5)], false).unwrap();
        assert_eq!(g.w2().unwrap(), 4.25);
        let empty = WeightedGraph::from_edges(Vec::<(&str, &str, f64)>::new(), false).unwrap();
        assert!(matches!(empty.w2(), Err(AzError::NoEdges)));
    }

    #[test]
    fn complete_graph_edge_count() {
        let nodes: Vec<NodeId> = (0..7).map(NodeId::from).collect();
        assert_eq!(WeightedGraph::complete(&nodes).n_edges(), 21);
    }
}
