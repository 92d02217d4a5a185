mod common;

use std::collections::HashMap;

use azwhite::graph::{build_multiplex, khop_augment, temporal_weight, HopWeight};
use azwhite::stats::{c_tilde, sign_product};
use azwhite::{az_statistic_dynamic, az_statistic_static, DynamicGraph, GraphSignal, NodeId, WeightedGraph};
use common::{multiplex_oracle, random_instance, random_static};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn map_snapshots<F>(dg: &DynamicGraph, f: F) -> DynamicGraph
where
    F: Fn(&WeightedGraph) -> WeightedGraph,
{
    DynamicGraph::new(dg.iter().map(|(_, g)| f(g)).collect()).unwrap()
}

fn dyn_c(dg: &DynamicGraph, x: &GraphSignal) -> f64 {
    az_statistic_dynamic(dg, x, 0.5, 0.05, None).unwrap().c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn half_lambda_matches_materialised_multiplex(seed in any::<u64>()) {
        let (dg, x) = random_instance(seed, 15, 10);
        let c = dyn_c(&dg, &x);
        let oracle = multiplex_oracle(&dg, &x);
        prop_assert!((c - oracle).abs() <= 1e-10, "{c} vs {oracle}");
    }

    #[test]
    fn multiplex_counting_identities(seed in any::<u64>()) {
        let (dg, _) = random_instance(seed, 12, 8);
        let m = build_multiplex(&dg, None).unwrap();
        let nodes: usize = dg.iter().map(|(_, g)| g.n_nodes()).sum();
        let spatial: usize = dg.iter().map(|(_, g)| g.n_edges()).sum();
        let temporal: usize = (1..dg.horizon())
            .map(|t| dg.snapshot(t).nodes().iter().filter(|n| dg.snapshot(t + 1).contains(n)).count())
            .sum();
        prop_assert_eq!(m.nodes.len(), nodes);
        prop_assert_eq!(m.spatial_edges.len(), spatial);
        prop_assert_eq!(m.temporal_edges.len(), temporal);
    }

    #[test]
    fn per_node_positive_scaling_changes_nothing(seed in any::<u64>()) {
        let (dg, x) = random_instance(seed, 12, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scales: Vec<f64> = (0..x.nodes().len()).map(|_| rng.random_range(1e-3..1e3)).collect();
        let y = x.scale_nodes(|i| scales[i]).unwrap();
        let a = az_statistic_dynamic(&dg, &x, 0.5, 0.05, None).unwrap();
        let b = az_statistic_dynamic(&dg, &y, 0.5, 0.05, None).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn negation_keeps_c(seed in any::<u64>()) {
        let (dg, x) = random_instance(seed, 12, 6);
        let y = x.map_values(x.dim(), |v| v.iter().map(|a| -a).collect()).unwrap();
        prop_assert_eq!(dyn_c(&dg, &x), dyn_c(&dg, &y));
    }

    #[test]
    fn weight_scaling_keeps_c(seed in any::<u64>(), k in 1e-3f64..1e3) {
        let (dg, x) = random_instance(seed, 12, 6);
        let scaled = map_snapshots(&dg, |g| g.scale_weights(k).unwrap());
        prop_assert!((dyn_c(&dg, &x) - dyn_c(&scaled, &x)).abs() <= 1e-12);
    }

    #[test]
    fn relabelling_keeps_c(seed in any::<u64>()) {
        let (dg, x) = random_instance(seed, 12, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..12).collect();
        perm.shuffle(&mut rng);
        let table: HashMap<NodeId, NodeId> = (0..12)
            .map(|i| (NodeId::new(format!("n{i}")), NodeId::new(format!("m{}", perm[i]))))
            .collect();
        let f = |n: &NodeId| table[n].clone();
        let dg2 = map_snapshots(&dg, |g| g.relabel(f).unwrap());
        let x2 = x.relabel(f).unwrap();
        prop_assert_eq!(dyn_c(&dg, &x), dyn_c(&dg2, &x2));
    }

    #[test]
    fn symmetrisation_keeps_c_and_w2(seed in any::<u64>()) {
        let (dg, x) = random_instance(seed, 12, 6);
        let sym = map_snapshots(&dg, |g| g.symmetrize());
        prop_assert_eq!(dyn_c(&dg, &x), dyn_c(&sym, &x));
        for (t, g) in dg.iter() {
            if g.n_edges() > 0 {
                prop_assert_eq!(g.w2().unwrap(), sym.snapshot(t).w2().unwrap());
            }
        }
    }

    #[test]
    fn one_hop_augmentation_is_identity(seed in any::<u64>()) {
        let (g, _) = random_static(seed, 12);
        let k1 = khop_augment(&g, 1, HopWeight::Unit).unwrap();
        prop_assert_eq!(k1.edge_triples().collect::<Vec<_>>(), g.edge_triples().collect::<Vec<_>>());
    }

    #[test]
    fn balanced_temporal_weight(w2 in 1e-6f64..1e6, n in 1usize..100_000) {
        let w = temporal_weight(w2, n).unwrap();
        prop_assert!(((n as f64) * w * w - w2).abs() <= 1e-12 * w2);
    }

    #[test]
    fn static_matches_single_step_dynamic(seed in any::<u64>()) {
        let (g, x) = random_static(seed, 12);
        let s = az_statistic_static(&g, &x, 0.05).unwrap();
        let d = az_statistic_dynamic(&DynamicGraph::replicate(g, 1).unwrap(), &x, 1.0, 0.05, None).unwrap();
        prop_assert_eq!(s.c, d.c);
        prop_assert_eq!(s.p_value, d.p_value);
    }

    #[test]
    fn zero_signs_counted_and_kept_in_w2(seed in any::<u64>()) {
        // integer-valued signals make zero inner products common
        let (g, x) = random_static(seed, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = x.map_values(1, |_| vec![rng.random_range(-1i32..=1) as f64]).unwrap();
        let r = az_statistic_static(&g, &xi, 0.05).unwrap();
        let sym = g.symmetrize();
        let mut zeros = 0;
        let mut num = 0.0;
        for (u, v, w) in sym.edge_triples() {
            let s = sign_product(xi.get_by_id(u, 1).unwrap(), xi.get_by_id(v, 1).unwrap()).unwrap();
            zeros += usize::from(s == 0);
            num += w * f64::from(s);
        }
        prop_assert_eq!(r.n_zero_signs, zeros);
        prop_assert_eq!(r.w2_sp, g.w2().unwrap());
        prop_assert!((c_tilde(&g, &xi).unwrap() - num).abs() < 1e-12 * (1.0 + num.abs()));
    }
}
