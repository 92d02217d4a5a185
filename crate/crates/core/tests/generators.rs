use azwhite::graph::{generate_graph, GraphSpec};
use azwhite::signalgen::*;
use azwhite::stats::{ks_test, normal_cdf};
use azwhite::{az_statistic_dynamic, DynamicGraph, GraphSignal, WeightedGraph};

fn community() -> WeightedGraph {
    generate_graph(GraphSpec::CommunityLine { communities: 5, size: 6, p_in: 0.8 }, 0).unwrap()
}

fn rejection_rate<F>(reps: u64, mut test: F) -> f64
where
    F: FnMut(u64) -> bool,
{
    (0..reps).filter(|&r| test(r)).count() as f64 / reps as f64
}

#[test]
fn offset_regression_constant() {
    // numpy oracle over 10 x 2e6 draws: 0.37315 +/- 0.0011
    let m = estimate_offset(DistributionSpec::Chi2Shifted(1), 0.0, 0.64, &community(), 1_000_000, OFFSET_SEED)
        .unwrap();
    assert!((m - 0.37315).abs() < 0.005, "{m}");
    assert_eq!(m, 0.3723384134008976);
}

#[test]
fn offsets_of_centred_specs() {
    let g = community();
    for c in [0.0, 0.3, 1.0] {
        assert_eq!(estimate_offset(DistributionSpec::Gaussian, c, c, &g, 100_000, 1).unwrap(), 0.0);
    }
    let m = estimate_offset(DistributionSpec::Chi2Shifted(1), 0.0, 0.0, &g, 100_000, 1).unwrap();
    assert!(m.abs() <= 0.01);
    assert!(estimate_offset(DistributionSpec::Gaussian, 0.1, 0.1, &g, 10, 1).is_err());
}

#[test]
fn temporal_coupling_gives_positive_autocorrelation() {
    let g = community();
    let x = gen_correlated(&g, 2000, 1, DistributionSpec::Gaussian, 0.0, 0.64, 5).unwrap();
    let (mut num, mut den, mut n) = (0.0, 0.0, 0.0);
    for i in 0..x.nodes().len() {
        for t in 1..2000 {
            let a = x.get(i, t).unwrap()[0];
            let b = x.get(i, t + 1).unwrap()[0];
            num += a * b;
            den += a * a;
            n += 1.0;
        }
    }
    let rho = num / den;
    // under independence rho has standard error ~ 1/sqrt(n)
    assert!(rho > 5.0 / f64::sqrt(n), "rho = {rho}");
}

#[test]
fn correlated_signal_has_null_median() {
    // The process is dependent in space and time, so the standard error of
    // the median is taken from independent replicates, not the iid formula.
    let g = community();
    for spec in [DistributionSpec::Chi2Shifted(1), DistributionSpec::Chi2Mixture, DistributionSpec::UniformMixture] {
        let medians: Vec<f64> = (0..12)
            .map(|r| {
                let x = gen_correlated(&g, 3400, 1, spec, 0.64, 0.64, 100 + r).unwrap();
                let mut v = x.feature_values(0);
                assert!(v.len() >= 100_000);
                azwhite::numeric::median(&mut v).unwrap()
            })
            .collect();
        let k = medians.len() as f64;
        let mean = medians.iter().sum::<f64>() / k;
        let se = (medians.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        assert!(medians[0].abs() < 3.0 * se, "{spec}: median {} vs se {se}", medians[0]);
        assert!(mean.abs() < 3.0 * se / k.sqrt(), "{spec}: mean median {mean} vs se {se}");
    }
}

#[test]
fn strong_coupling_is_detected() {
    let g = community();
    let dg = DynamicGraph::replicate(g.clone(), 500).unwrap();
    let rate = rejection_rate(100, |r| {
        let x = gen_correlated(&g, 500, 1, DistributionSpec::Gaussian, 0.64, 0.64, r).unwrap();
        az_statistic_dynamic(&dg, &x, 0.5, 0.05, None).unwrap().reject
    });
    assert!(rate >= 0.9, "{rate}");
}

#[test]
fn white_signal_covers_present_nodes_only() {
    let a = WeightedGraph::from_edges([("a", "b", 1.0)], false).unwrap();
    let b = WeightedGraph::from_edges([("b", "c", 1.0)], false).unwrap();
    let dg = DynamicGraph::new(vec![a, b]).unwrap();
    let x = gen_white(&dg, 2, DistributionSpec::Gaussian, 1).unwrap();
    assert_eq!(x.n_observations(), 4);
    assert!(x.get_by_id(&"c".into(), 1).is_none());
    assert!(x.get_by_id(&"a".into(), 2).is_none());
    assert!(x.get_by_id(&"c".into(), 2).is_some());
    assert_ne!(x, gen_white(&dg, 2, DistributionSpec::Gaussian, 2).unwrap());
    assert_eq!(x, gen_white(&dg, 2, DistributionSpec::Gaussian, 1).unwrap());
}

#[test]
fn white_signals_are_calibrated_for_every_distribution() {
    // |E| * T = 65 * 80 >= 5000
    let g = community();
    let dg = DynamicGraph::replicate(g, 80).unwrap();
    for spec in DistributionSpec::all() {
        let cs: Vec<f64> = (0..1000)
            .map(|r| {
                let x = gen_white(&dg, 1, spec, 10_000 + r).unwrap();
                az_statistic_dynamic(&dg, &x, 0.5, 0.05, None).unwrap().c
            })
            .collect();
        let ks = ks_test(&cs, normal_cdf).unwrap();
        assert!(ks.p_value > 0.01, "{spec}: KS p = {}", ks.p_value);
    }
}

#[test]
fn gpvar_with_zero_filter_is_calibrated() {
    let g = community();
    let p = GpvarParams::new(vec![vec![0.0, 0.0]; 3]).unwrap();
    let dg = DynamicGraph::replicate(g.clone(), 200).unwrap();
    let rate = rejection_rate(200, |r| {
        let out = gen_gpvar(&g, 200, &p, r, DEFAULT_BURN_IN).unwrap();
        az_statistic_dynamic(&dg, &out.signal, 0.5, 0.05, None).unwrap().reject
    });
    assert!((0.01..=0.11).contains(&rate), "{rate}");
}

#[test]
fn gpvar_replay_and_residual_mae() {
    let g = community();
    let p = GpvarParams::reference();
    let a = gen_gpvar(&g, 500, &p, 7, DEFAULT_BURN_IN).unwrap();
    let b = gen_gpvar(&g, 500, &p, 7, DEFAULT_BURN_IN).unwrap();
    assert_eq!(a.signal, b.signal);
    let res = gpvar_residuals(&g, &a.signal, &p).unwrap();
    let mut tail = GraphSignal::new(1, 500 - p.lags()).unwrap();
    for (i, n) in a.noise.nodes().iter().enumerate() {
        for t in p.lags() + 1..=500 {
            tail.insert(n.clone(), t - p.lags(), a.noise.get(i, t).unwrap().to_vec()).unwrap();
        }
    }
    assert_eq!(res, tail);
    assert_eq!(res.mean_abs(), tail.mean_abs());
}
