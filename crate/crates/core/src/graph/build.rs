use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{NodeId, WeightedGraph};
use crate::error::{AzError, Result};
use crate::numeric::population_std;
use crate::rng::CounterRng;

/// Weight given to an added K-hop edge as a function of its hop distance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum HopWeight {
    /// Every added edge has weight 1.
    #[default]
    Unit,
    /// An edge between nodes at distance `k` has weight `1/k`.
    InverseDistance,
}

impl HopWeight {
    pub fn weight(self, k: usize) -> f64 {
        match self {
            HopWeight::Unit => 1.0,
            HopWeight::InverseDistance => 1.0 / k as f64,
        }
    }
}

impl FromStr for HopWeight {
    type Err = AzError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" | "constant" => Ok(HopWeight::Unit),
            "inverse" | "1/k" => Ok(HopWeight::InverseDistance),
            _ => Err(AzError::invalid(format!("unknown hop weight rule '{s}'"))),
        }
    }
}

/// Connect every pair of nodes at shortest-path distance `2..=k`.
///
/// Existing edges are kept with their weights; each unordered pair appears at
/// most once. `k = 1` returns the graph unchanged.
pub fn khop_augment(g: &WeightedGraph, k: usize, rule: HopWeight) -> Result<WeightedGraph> {
    if k < 1 {
        return Err(AzError::invalid("K must be >= 1"));
    }
    if g.is_directed() {
        return Err(AzError::invalid("K-hop augmentation needs an undirected graph"));
    }
    if k == 1 {
        return Ok(g.clone());
    }
    let n = g.n_nodes();
    let adj = g.in_neighbors();
    let mut added = Vec::new();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            if dist[u] == k {
                continue;
            }
            for &(v, _) in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (dst, &d) in dist.iter().enumerate() {
            if dst > src && d >= 2 && d <= k {
                added.push((g.node(src).clone(), g.node(dst).clone(), rule.weight(d)));
            }
        }
    }
    let edges = g
        .edge_triples()
        .map(|(u, v, w)| (u.clone(), v.clone(), w))
        .chain(added);
    WeightedGraph::validate(g.nodes().iter().cloned(), edges, false).map(|(g, _)| g)
}

/// Thresholded Gaussian-kernel graph from pairwise distances.
///
/// An edge `(u, v)` exists iff `0 < d < kappa`, with weight `exp(-d^2 / sigma)`
/// where `sigma` is the population standard deviation of all admissible
/// distances.
pub fn graph_from_distances(
    pairs: &[(NodeId, NodeId, f64)],
    kappa: f64,
    directed: bool,
) -> Result<WeightedGraph> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(AzError::invalid(format!("kappa must be > 0, got {kappa}")));
    }
    if let Some((u, v, d)) = pairs.iter().find(|(_, _, d)| !(d.is_finite() && *d >= 0.0)) {
        return Err(AzError::invalid(format!(
            "distance ({u}, {v}) = {d} is not a nonnegative number"
        )));
    }
    let admissible: Vec<&(NodeId, NodeId, f64)> =
        pairs.iter().filter(|(_, _, d)| *d > 0.0 && *d < kappa).collect();
    let dists: Vec<f64> = admissible.iter().map(|p| p.2).collect();
    let sigma = population_std(&dists)
        .ok_or_else(|| AzError::EmptyGraph(format!("no distance in (0, {kappa})")))?;
    if sigma <= 0.0 {
        return Err(AzError::EmptyGraph(
            "admissible distances have zero spread: kernel width undefined".into(),
        ));
    }
    let nodes = pairs.iter().flat_map(|(u, v, _)| [u.clone(), v.clone()]);
    let edges = admissible
        .iter()
        .map(|(u, v, d)| (u.clone(), v.clone(), (-d * d / sigma).exp()));
    WeightedGraph::validate(nodes, edges, directed).map(|(g, _)| g)
}

/// Random graph families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, p: f64 },
    /// `communities` dense blocks of `size` nodes (intra-block edge
    /// probability `p_in`) chained by one bridge edge between consecutive
    /// blocks.
    CommunityLine { communities: usize, size: usize, p_in: f64 },
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::ErdosRenyi { n, p } => write!(f, "er:{n},{p}"),
            GraphSpec::CommunityLine { communities, size, p_in } => {
                write!(f, "community:{communities},{size},{p_in}")
            }
        }
    }
}

impl FromStr for GraphSpec {
    type Err = AzError;

    /// `er:<n>,<p>` or `community:<communities>,<size>,<p_in>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AzError::invalid(format!("bad graph spec '{s}'"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        match (kind, args.as_slice()) {
            ("er" | "erdos_renyi", [n, p]) => Ok(GraphSpec::ErdosRenyi {
                n: n.parse().map_err(|_| bad())?,
                p: p.parse().map_err(|_| bad())?,
            }),
            ("community" | "community_line", [c, k, p]) => Ok(GraphSpec::CommunityLine {
                communities: c.parse().map_err(|_| bad())?,
                size: k.parse().map_err(|_| bad())?,
                p_in: p.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Sample an undirected unit-weight graph. Node ids are `0..n-1`; each
/// candidate pair `(i, j)` uses its own counter-addressed stream so the
/// result depends only on `(spec, seed)`.
pub fn generate_graph(spec: GraphSpec, seed: u64) -> Result<WeightedGraph> {
    let rng = CounterRng::new(seed);
    let coin = |i: usize, j: usize, p: f64| -> bool {
        p >= 1.0 || (p > 0.0 && rng.stream(&[i as u64, j as u64]).random::<f64>() < p)
    };
    let check_p = |p: f64| {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(AzError::invalid(format!("probability must be in [0,1], got {p}")))
        }
    };
    let (n, edges) = match spec {
        GraphSpec::ErdosRenyi { n, p } => {
            check_p(p)?;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if coin(i, j, p) {
                        edges.push((i, j));
                    }
                }
            }
            (n, edges)
        }
        GraphSpec::CommunityLine { communities, size, p_in } => {
            check_p(p_in)?;
            if communities == 0 || size == 0 {
                return Err(AzError::invalid("communities and size must be >= 1"));
            }
            let mut edges = Vec::new();
            for c in 0..communities {
                let base = c * size;
                for i in 0..size {
                    for j in i + 1..size {
                        if coin(base + i, base + j, p_in) {
                            edges.push((base + i, base + j));
                        }
                    }
                }
                if c + 1 < communities {
                    edges.push((base + size - 1, base + size));
                }
            }
            (communities * size, edges)
        }
    };
    let nodes = (0..n).map(NodeId::from);
    let edges = edges
        .into_iter()
        .map(|(i, j)| (NodeId::from(i), NodeId::from(j), 1.0));
    WeightedGraph::validate(nodes, edges, false).map(|(g, _)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(g: &WeightedGraph) -> Vec<(String, String, f64)> {
        let mut v: Vec<_> = g
            .edge_triples()
            .map(|(a, b, w)| {
                let (a, b) = (a.to_string(), b.to_string());
                if a < b { (a, b, w) } else { (b, a, w) }
            })
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    }

    fn s(a: &str, b: &str, w: f64) -> (String, String, f64) {
        (a.into(), b.into(), w)
    }

    #[test]
    fn khop_path() {
        let g = WeightedGraph::from_edges([("1", "2", 1.0), ("2", "3", 1.0)], false).unwrap();
        let a = khop_augment(&g, 2, HopWeight::Unit).unwrap();
        assert_eq!(pairs(&a), vec![s("1", "2", 1.0), s("1", "3", 1.0), s("2", "3", 1.0)]);
        let a = khop_augment(&g, 2, HopWeight::InverseDistance).unwrap();
        assert!(pairs(&a).contains(&s("1", "3", 0.5)));
    }

    #[test]
    fn khop_triangle_adds_nothing() {
        let g = WeightedGraph::from_edges([("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)], false)
            .unwrap();
        assert_eq!(khop_augment(&g, 2, HopWeight::Unit).unwrap().n_edges(), 3);
    }

    #[test]
    fn khop_star() {
        let g = WeightedGraph::from_edges([("c", "a", 1.0), ("c", "b", 1.0), ("c", "d", 1.0)], false)
            .unwrap();
        let p = pairs(&khop_augment(&g, 2, HopWeight::Unit).unwrap());
        assert_eq!(p.len(), 6);
        for leaf in [s("a", "b", 1.0), s("a", "d", 1.0), s("b", "d", 1.0)] {
            assert!(p.contains(&leaf));
        }
    }

    #[test]
    fn khop_errors_and_identity() {
        let g = WeightedGraph::from_edges([("1", "2", 0.3)], false).unwrap();
        assert!(khop_augment(&g, 0, HopWeight::Unit).is_err());
        assert_eq!(pairs(&khop_augment(&g, 1, HopWeight::Unit).unwrap()), pairs(&g));
        let d = WeightedGraph::from_edges([("1", "2", 1.0)], true).unwrap();
        assert!(khop_augment(&d, 2, HopWeight::Unit).is_err());
    }

    fn dist(u: &str, v: &str, d: f64) -> (NodeId, NodeId, f64) {
        (u.into(), v.into(), d)
    }

    #[test]
    fn distances_open_interval_and_kernel() {
        // sigma = std{1, 2} = 0.5; the pair at 3 lies beyond kappa
        let g = graph_from_distances(
            &[dist("a", "b", 1.0), dist("b", "c", 2.0), dist("a", "c", 3.0)],
            2.5,
            false,
        )
        .unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(
            pairs(&g),
            vec![s("a", "b", (-1.0f64 / 0.5).exp()), s("b", "c", (-4.0f64 / 0.5).exp())]
        );

        // delta == kappa is excluded
        let g = graph_from_distances(
            &[dist("a", "b", 1.0), dist("b", "c", 2.0), dist("c", "d", 2.5)],
            2.5,
            false,
        )
        .unwrap();
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn distances_unit_exponent() {
        // sigma = std{0.5, 1.0} = 0.25 = 0.5^2, so the first weight is e^-1
        let g = graph_from_distances(&[dist("a", "b", 0.5), dist("c", "d", 1.0)], 2.0, false)
            .unwrap();
        assert!((g.edges()[0].w - 0.36787944117144233).abs() < 1e-15);
    }

    #[test]
    fn distances_errors() {
        assert!(matches!(
            graph_from_distances(&[dist("a", "b", 5.0)], 2.0, false),
            Err(AzError::EmptyGraph(_))
        ));
        assert!(graph_from_distances(&[dist("a", "b", -1.0)], 2.0, false).is_err());
        assert!(graph_from_distances(&[dist("a", "b", 1.0)], 2.0, false).is_err());
    }

    #[test]
    fn erdos_renyi_extremes() {
        let g = generate_graph(GraphSpec::ErdosRenyi { n: 5, p: 0.0 }, 1).unwrap();
        assert_eq!((g.n_nodes(), g.n_edges()), (5, 0));
        let g = generate_graph(GraphSpec::ErdosRenyi { n: 5, p: 1.0 }, 1).unwrap();
        assert_eq!(g.n_edges(), 10);
        assert!(generate_graph(GraphSpec::ErdosRenyi { n: 5, p: 1.5 }, 1).is_err());
    }

    #[test]
    fn community_line_is_deterministic() {
        let spec = GraphSpec::CommunityLine { communities: 5, size: 6, p_in: 0.8 };
        let a = generate_graph(spec, 11).unwrap();
        let b = generate_graph(spec, 11).unwrap();
        assert_eq!(pairs(&a), pairs(&b));
        assert_eq!(a.n_nodes(), 30);
        assert_ne!(pairs(&a), pairs(&generate_graph(spec, 12).unwrap()));
        // bridges
        for c in 0..4 {
            let (u, v) = ((c * 6 + 5).to_string(), (c * 6 + 6).to_string());
            assert!(pairs(&a).contains(&(u, v, 1.0)));
        }
    }

    #[test]
    fn graph_spec_round_trip() {
        let s: GraphSpec = "community:5,6,0.8".parse().unwrap();
        assert_eq!(s, GraphSpec::CommunityLine { communities: 5, size: 6, p_in: 0.8 });
        assert_eq!(s.to_string().parse::<GraphSpec>().unwrap(), s);
        assert!("er:5".parse::<GraphSpec>().is_err());
    }
}
