mod common;

use common::dv;
use netpercolate::analysis::{analyze, analyze_distribution, analyze_graph};
use netpercolate::degrees::JointDegreeDistribution;
use netpercolate::epidemic::{edge_failure_epidemic, er_closed_form, ErParams};
use netpercolate::genfunc::GenFunc;
use netpercolate::graph::{reachable_set, Edge, TypedDigraph};
use netpercolate::montecarlo::{
    estimate_with_threads, generate_er, measure_graph, occupy_sample, summarize, trial_rng, SimConfig, TrialRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Occupied configuration-model samples of `dist`, measured like the
/// Erdős–Rényi oracle.
fn configuration_trials(dist: &JointDegreeDistribution<f64>, p: &[f64], n: usize, graphs: usize, seed: u64) -> Vec<TrialRecord> {
    let counts = common::exact_counts(dist, n);
    (0..graphs)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let g = common::configuration_graph(&counts, &mut rng);
            let occ = occupy_sample(&g, p, &mut rng).unwrap();
            measure_graph(&occ, 1000, &mut rng, t)
        })
        .collect()
}

#[test]
fn thread_count_does_not_change_results() {
    let mut config = SimConfig::new(3000, vec![1.2, 0.9], vec![0.7, 0.9], 6, 42);
    config.outbreak_seeds = 200;
    let (a, ra) = estimate_with_threads(&config, 1).unwrap();
    let (b, rb) = estimate_with_threads(&config, 4).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(a, b);
    config.seed = 43;
    let (_, rc) = estimate_with_threads(&config, 4).unwrap();
    assert_ne!(ra, rc);
}

#[test]
fn subcritical_outbreaks_are_sublinear() {
    let largest_fraction = |n: usize| {
        let mut rng = trial_rng(9, n as u64, 0);
        let g = generate_er(n, &[0.8], &mut rng).unwrap();
        let biggest = (0..300).map(|_| reachable_set(&g, rng.random_range(0..n)).unwrap().len()).max().unwrap();
        biggest as f64 / n as f64
    };
    let small = largest_fraction(2_000);
    let large = largest_fraction(32_000);
    assert!(large < small, "{large} !< {small}");
    assert!(large < 0.01);
}

#[test]
fn subcritical_er_mean_size() {
    let mut config = SimConfig::new(10_000, vec![0.8, 0.6], vec![0.5, 0.5], 12, 5);
    config.outbreak_seeds = 500;
    let (est, _) = estimate_with_threads(&config, 4).unwrap();
    let expect = analyze(&GenFunc::poisson(config.lambda.clone()).unwrap(), &config.p).unwrap().outbreak.e_s_node.unwrap();
    let z = est.mean_outbreak.z_score(expect);
    assert!(z < 3.0, "mean {} vs {expect} (z = {z})", est.mean_outbreak.mean);
    assert_eq!(est.p_ep_hat.mean, 0.0);
}

#[test]
fn table_kernel_mean_size_matches_simulation() {
    let dist = JointDegreeDistribution::new(
        2,
        [
            (dv(&[1, 0], &[0, 1]), 0.25),
            (dv(&[0, 1], &[1, 0]), 0.25),
            (dv(&[1, 1], &[1, 1]), 0.25),
            (dv(&[0, 0], &[0, 0]), 0.25),
        ],
    )
    .unwrap();
    let p = [0.6, 0.4];
    let a = analyze_distribution::<f64>(&dist, &p).unwrap();
    assert!((a.outbreak.det_a - 0.32).abs() < 1e-12);
    let expect = a.outbreak.e_s_node.unwrap();
    let est = summarize(20_000, &configuration_trials(&dist, &p, 20_000, 20, 11));
    let z = est.mean_outbreak.z_score(expect);
    assert!(z < 3.0, "mean {} vs {expect} (z = {z})", est.mean_outbreak.mean);
}

#[test]
fn asymmetric_table_probability_and_fraction_match_simulation() {
    let dist = JointDegreeDistribution::new(1, [(dv(&[1], &[3]), 0.25), (dv(&[2], &[1]), 0.25), (dv(&[1], &[0]), 0.25), (dv(&[0], &[0]), 0.25)])
        .unwrap();
    let a = analyze_distribution(&dist, &[1.0]).unwrap();
    let n = 40_000;
    let est = summarize(n, &configuration_trials(&dist, &[1.0], n, 4, 12));
    assert!((est.p_ep_hat.mean - a.epidemic.p_ep).abs() < 0.02, "{} vs {}", est.p_ep_hat.mean, a.epidemic.p_ep);
    assert!((est.f_hat.mean - a.epidemic.f).abs() < 0.02, "{} vs {}", est.f_hat.mean, a.epidemic.f);
}

#[test]
fn supercritical_er_grid() {
    for (s, seed) in [(1.5, 1u64), (2.5, 2)] {
        let lambda = vec![s / 0.6 * 0.5, s / 0.8 * 0.5];
        let p = vec![0.6, 0.8];
        let mut config = SimConfig::new(30_000, lambda.clone(), p.clone(), 4, seed);
        config.outbreak_seeds = 50;
        let (est, _) = estimate_with_threads(&config, 4).unwrap();
        let closed = er_closed_form(&ErParams::new(lambda, p).unwrap());
        assert!((est.p_ep_hat.mean - closed.p_ep).abs() < 0.02, "s={s}: {} vs {}", est.p_ep_hat.mean, closed.p_ep);
        assert!((est.f_hat.mean - closed.f).abs() < 0.02, "s={s}: {} vs {}", est.f_hat.mean, closed.f);
    }
}

#[test]
fn edge_split_barely_moves_epidemic_probability() {
    let n = 10_000;
    let g = generate_er(n, &[1.5, 1.0], &mut trial_rng(3, 0, 0)).unwrap();
    let p = [0.8, 0.6];
    let before = analyze_graph::<f64>(&g, &p).unwrap().epidemic.p_ep;
    assert!(before > 0.1);
    let after = edge_failure_epidemic::<f64>(&g, g.edge_count() / 2, &p).unwrap().p_ep;
    assert!((after - before).abs() < 10.0 / n as f64, "{before} -> {after}");
}

#[test]
fn single_edge_has_no_epidemic() {
    let g = TypedDigraph::new(2, 1, vec![Edge::new(0, 1, 0)]).unwrap();
    let r = edge_failure_epidemic::<f64>(&g, 0, &[1.0]).unwrap();
    assert_eq!((r.p_ep, r.f), (0.0, 0.0));
}
