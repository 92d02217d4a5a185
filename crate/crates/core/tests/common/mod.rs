#![allow(dead_code)]

use azwhite::{DynamicGraph, GraphSignal, NodeId, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random dynamic graph with random node presence and weights, plus a
/// signal defined exactly on the present nodes. Never edgeless.
pub fn random_instance(seed: u64, max_nodes: usize, max_t: usize) -> (DynamicGraph, GraphSignal) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(2..=max_nodes);
        let horizon = rng.random_range(1..=max_t);
        let dim = rng.random_range(1..=3);
        let directed = rng.random_bool(0.3);
        let p_present = rng.random_range(0.5..1.0);
        let p_edge = rng.random_range(0.1..0.6);
        let ids: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("n{i}"))).collect();

        let mut snapshots = Vec::new();
        let mut x = GraphSignal::new(dim, horizon).unwrap();
        for t in 1..=horizon {
            let present: Vec<&NodeId> = ids.iter().filter(|_| rng.random_bool(p_present)).collect();
            let mut edges = Vec::new();
            for (a, u) in present.iter().enumerate() {
                for (b, v) in present.iter().enumerate() {
                    let candidate = if directed { a != b } else { a < b };
                    if candidate && rng.random_bool(p_edge) {
                        edges.push(((*u).clone(), (*v).clone(), rng.random_range(0.1..3.0)));
                    }
                }
            }
            for v in &present {
                let val: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                x.insert((*v).clone(), t, val).unwrap();
            }
            let nodes = present.into_iter().cloned();
            snapshots.push(WeightedGraph::validate(nodes, edges, directed).unwrap().0);
        }
        let dg = DynamicGraph::new(snapshots).unwrap();
        let spatial = dg.iter().any(|(_, g)| g.n_edges() > 0);
        if spatial {
            return (dg, x);
        }
    }
}

/// Random undirected static graph and scalar signal (`T = 1`).
pub fn random_static(seed: u64, max_nodes: usize) -> (WeightedGraph, GraphSignal) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    loop {
        let n = rng.random_range(3..=max_nodes);
        let dim = rng.random_range(1..=3);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.4) {
                    edges.push((i.to_string(), j.to_string(), rng.random_range(0.1..3.0)));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let g = WeightedGraph::from_edges(edges, false).unwrap();
        let mut x = GraphSignal::new(dim, 1).unwrap();
        for v in g.nodes() {
            let val: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            x.insert(v.clone(), 1, val).unwrap();
        }
        return (g, x);
    }
}

/// The lambda = 1/2 statistic computed on the explicitly built multiplex
/// graph with the static statistic.
pub fn multiplex_oracle(dg: &DynamicGraph, x: &GraphSignal) -> f64 {
    let mg = azwhite::graph::build_multiplex(&dg.with_signal_presence(x).unwrap(), None).unwrap();
    let g = mg.to_static().unwrap();
    let xs = mg.stacked_signal(x).unwrap();
    azwhite::az_statistic_static(&g, &xs, 0.05).unwrap().c
}
