//! Graph signals: an `F`-dimensional real vector per `(node, t)`, with
//! missing pairs allowed.

use std::collections::HashMap;

use crate::error::{AzError, Result};
use crate::graph::NodeId;

/// `(node, t) -> R^F` with `t` in `1..=horizon`.
///
/// Storage is dense per node (`horizon * dim` values plus a presence mask),
/// so lookups by node index and time are O(1).
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSignal {
    dim: usize,
    horizon: usize,
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    values: Vec<Vec<f64>>,
    present: Vec<Vec<bool>>,
}

impl GraphSignal {
    pub fn new(dim: usize, horizon: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AzError::invalid("feature dimension F must be >= 1"));
        }
        if horizon == 0 {
            return Err(AzError::invalid("horizon T must be >= 1"));
        }
        Ok(Self {
            dim,
            horizon,
            nodes: Vec::new(),
            index: HashMap::new(),
            values: Vec::new(),
            present: Vec::new(),
        })
    }

    /// Static scalar signal (`F = 1`, `T = 1`).
    pub fn from_scalars<I, N>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, f64)>,
        N: Into<NodeId>,
    {
        let mut x = Self::new(1, 1)?;
        for (n, v) in values {
            x.insert(n.into(), 1, vec![v])?;
        }
        Ok(x)
    }

    /// Register a node without values; returns its index.
    pub fn add_node(&mut self, n: NodeId) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.index.insert(n.clone(), i);
        self.nodes.push(n);
        self.values.push(vec![0.0; self.horizon * self.dim]);
        self.present.push(vec![false; self.horizon]);
        i
    }

    /// Set the value at `(node, t)`, replacing any previous one.
    pub fn insert(&mut self, node: NodeId, t: usize, value: Vec<f64>) -> Result<()> {
        if value.len() != self.dim {
            return Err(AzError::DimensionMismatch {
                expected: self.dim,
                got: value.len(),
            });
        }
        let i = self.add_node(node);
        self.set(i, t, &value)
    }

    /// Set the value at `(node index, t)`.
    pub fn set(&mut self, i: usize, t: usize, value: &[f64]) -> Result<()> {
        if t == 0 || t > self.horizon {
            return Err(AzError::invalid(format!(
                "time index {t} outside 1..={}",
                self.horizon
            )));
        }
        if value.len() != self.dim {
            return Err(AzError::DimensionMismatch {
                expected: self.dim,
                got: value.len(),
            });
        }
        if let Some(bad) = value.iter().find(|v| !v.is_finite()) {
            return Err(AzError::invalid(format!(
                "non-finite value {bad} at node {} t={t}",
                self.nodes[i]
            )));
        }
        let off = (t - 1) * self.dim;
        self.values[i][off..off + self.dim].copy_from_slice(value);
        self.present[i][t - 1] = true;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn index_of(&self, n: &NodeId) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Value at `(node index, t)`.
    #[inline]
    pub fn get(&self, i: usize, t: usize) -> Option<&[f64]> {
        if t == 0 || t > self.horizon || !self.present[i][t - 1] {
            return None;
        }
        let off = (t - 1) * self.dim;
        Some(&self.values[i][off..off + self.dim])
    }

    pub fn get_by_id(&self, n: &NodeId, t: usize) -> Option<&[f64]> {
        self.index_of(n).and_then(|i| self.get(i, t))
    }

    /// Number of `(node, t)` pairs carrying a value.
    pub fn n_observations(&self) -> usize {
        self.present
            .iter()
            .map(|p| p.iter().filter(|&&b| b).count())
            .sum()
    }

    /// All present observations as `(node index, t, value)`, node-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        (0..self.nodes.len()).flat_map(move |i| {
            (1..=self.horizon).filter_map(move |t| self.get(i, t).map(|v| (i, t, v)))
        })
    }

    /// Every present scalar entry of feature `f`.
    pub fn feature_values(&self, f: usize) -> Vec<f64> {
        self.iter().map(|(_, _, v)| v[f]).collect()
    }

    /// The scalar signal made of feature `f`.
    pub fn feature(&self, f: usize) -> Result<GraphSignal> {
        if f >= self.dim {
            return Err(AzError::invalid(format!("feature {f} out of range (F={})", self.dim)));
        }
        self.map_values(1, |v| vec![v[f]])
    }

    /// New signal with every present value replaced by `op(value)`.
    pub fn map_values<F>(&self, dim: usize, mut op: F) -> Result<GraphSignal>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut out = GraphSignal::new(dim, self.horizon)?;
        for n in &self.nodes {
            out.add_node(n.clone());
        }
        for (i, t, v) in self.iter() {
            out.set(i, t, &op(v))?;
        }
        Ok(out)
    }

    /// Present values with node `i` multiplied by `scale(i)`.
    pub fn scale_nodes<F: Fn(usize) -> f64>(&self, scale: F) -> Result<GraphSignal> {
        let mut out = self.clone();
        for i in 0..out.nodes.len() {
            let k = scale(i);
            out.values[i].iter_mut().for_each(|x| *x *= k);
        }
        Ok(out)
    }

    /// Rename nodes through an injective map.
    pub fn relabel<F: FnMut(&NodeId) -> NodeId>(&self, f: F) -> Result<GraphSignal> {
        let nodes: Vec<NodeId> = self.nodes.iter().map(f).collect();
        let index: HashMap<NodeId, usize> =
            nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        if index.len() != nodes.len() {
            return Err(AzError::invalid("relabelling is not injective"));
        }
        Ok(GraphSignal {
            nodes,
            index,
            ..self.clone()
        })
    }

    /// Mean absolute value over all present scalar entries.
    pub fn mean_abs(&self) -> f64 {
        let mut terms: Vec<f64> = self
            .iter()
            .flat_map(|(_, _, v)| v.iter().map(|x| x.abs()))
            .collect();
        let n = terms.len();
        if n == 0 {
            return 0.0;
        }
        crate::numeric::stable_sum(&mut terms) / n as f64
    }
}
