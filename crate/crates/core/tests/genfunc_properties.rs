#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeMap;

use netpercolate::degrees::{DegreeVector, JointDegreeDistribution};
use netpercolate::genfunc::{Direction, EvalPoint, GenFunc};
use netpercolate::graph::{Edge, TypedDigraph};
use proptest::prelude::*;

fn arb_table(max_classes: usize, max_deg: u32) -> impl Strategy<Value = JointDegreeDistribution<f64>> {
    (1..=max_classes).prop_flat_map(move |c| {
        prop::collection::vec(
            (
                prop::collection::vec(0..=max_deg, c),
                prop::collection::vec(0..=max_deg, c),
                0.05f64..1.0,
            ),
            1..6,
        )
        .prop_map(move |atoms| {
            let total: f64 = atoms.iter().map(|a| a.2).sum();
            JointDegreeDistribution::new(c, atoms.into_iter().map(|(i, o, w)| (DegreeVector::new(i, o), w / total)))
                .unwrap()
        })
    })
}

fn arb_probs(c: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, c)
}

fn arb_point(c: usize, lo: f64, hi: f64) -> impl Strategy<Value = EvalPoint<f64>> {
    (prop::collection::vec(lo..=hi, c), prop::collection::vec(lo..=hi, c)).prop_map(|(x, y)| EvalPoint::new(x, y))
}

fn table_and_point() -> impl Strategy<Value = (JointDegreeDistribution<f64>, EvalPoint<f64>, Vec<f64>)> {
    arb_table(3, 4).prop_flat_map(|d| {
        let c = d.n_classes();
        (Just(d), arb_point(c, 0.0, 1.0), arb_probs(c))
    })
}

proptest! {
    #[test]
    fn normalized_at_ones(d in arb_table(3, 5), p in arb_probs(3)) {
        let g = GenFunc::from_distribution(d.clone());
        let c = d.n_classes();
        prop_assert!((g.eval(&EvalPoint::ones(c)).unwrap() - 1.0).abs() < 1e-12);
        let occ = g.occupy(&p[..c]).unwrap();
        prop_assert!((occ.eval(&EvalPoint::ones(c)).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((g.dual().eval(&EvalPoint::ones(c)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_each_coordinate((d, pt, p) in table_and_point(), bump in 0.0f64..0.5, class in 0usize..3) {
        let c = d.n_classes();
        let class = class % c;
        let g = GenFunc::from_distribution(d).occupy(&p).unwrap();
        let base = g.eval(&pt).unwrap();
        let mut up = pt.clone();
        up.x[class] = (up.x[class] + bump).min(1.0);
        up.y[class] = (up.y[class] + bump).min(1.0);
        prop_assert!(g.eval(&up).unwrap() >= base - 1e-15);
        let v = g.eval(&pt).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn partial_matches_central_difference(
        (d, pt, p) in arb_table(3, 4).prop_flat_map(|d| {
            let c = d.n_classes();
            (Just(d), arb_point(c, 0.1, 0.9), arb_probs(c))
        }),
        class in 0usize..3,
        out in any::<bool>(),
    ) {
        let c = d.n_classes();
        let class = class % c;
        let dir = if out { Direction::Out } else { Direction::In };
        let g = GenFunc::from_distribution(d).occupy(&p).unwrap();
        let h = 1e-6;
        let nudge = |delta: f64| {
            let mut q = pt.clone();
            if out { q.y[class] += delta } else { q.x[class] += delta }
            q
        };
        let (lo, hi) = (nudge(-h), nudge(h));
        let fd = (g.eval(&hi).unwrap() - g.eval(&lo).unwrap()) / (2.0 * h);
        let exact = g.partial(dir, class, &pt).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-3), "fd {} exact {}", fd, exact);
    }

    #[test]
    fn occupation_equals_thinning((d, pt, p) in table_and_point()) {
        let direct = GenFunc::from_distribution(d.clone()).occupy(&p).unwrap().eval(&pt).unwrap();
        let thinned = GenFunc::from_distribution(d.thin(&p).unwrap()).eval(&pt).unwrap();
        prop_assert!((direct - thinned).abs() < 1e-12, "{} vs {}", direct, thinned);
    }

    #[test]
    fn occupied_excess_equals_excess_of_thinned((d, pt, p) in table_and_point(), class in 0usize..3) {
        let c = d.n_classes();
        let class = class % c;
        let occ = GenFunc::from_distribution(d.clone()).occupy(&p).unwrap();
        let thinned = GenFunc::from_distribution(d.thin(&p).unwrap());
        match (occ.excess(class), thinned.excess(class)) {
            (Ok(a), Ok(b)) => prop_assert!((a.eval(&pt).unwrap() - b.eval(&pt).unwrap()).abs() < 1e-10),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "excess disagreed: {:?} / {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn dual_is_an_involution((d, pt, p) in table_and_point()) {
        let g = GenFunc::from_distribution(d).occupy(&p).unwrap();
        let twice = g.dual().dual();
        prop_assert!((g.eval(&pt).unwrap() - twice.eval(&pt).unwrap()).abs() < 1e-15);
        let swapped = EvalPoint::new(pt.y.clone(), pt.x.clone());
        prop_assert!((g.eval(&pt).unwrap() - g.dual().eval(&swapped).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn composed_thinning((d, _pt, p) in table_and_point(), q in arb_probs(3)) {
        let c = d.n_classes();
        let q = &q[..c];
        let pq: Vec<f64> = p.iter().zip(q).map(|(a, b)| a * b).collect();
        let twice = d.thin(&p).unwrap().thin(q).unwrap();
        let once = d.thin(&pq).unwrap();
        let keys: std::collections::BTreeSet<_> = twice.iter().chain(once.iter()).map(|(k, _)| k.clone()).collect();
        for k in keys {
            prop_assert!((twice.get(&k) - once.get(&k)).abs() < 1e-12);
        }
    }

    #[test]
    fn thinning_preserves_mass_and_scales_means((d, _pt, p) in table_and_point()) {
        let t = d.thin(&p).unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-12);
        let (before, after) = (d.stats(), t.stats());
        let (ob, oa) = (d.out_stats(), t.out_stats());
        for i in 0..d.n_classes() {
            // pruning below 1e-15 can move the means by a few ulps of the degree scale
            prop_assert!((after.z_by_class[i] - p[i] * before.z_by_class[i]).abs() < 1e-12);
            prop_assert!((oa.z_by_class[i] - p[i] * ob.z_by_class[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_means((lambda, p) in (1usize..=4).prop_flat_map(|c| (prop::collection::vec(0.0f64..3.0, c), arb_probs(c)))) {
        let g = GenFunc::poisson(lambda.clone()).unwrap().occupy(&p).unwrap();
        for dir in [Direction::In, Direction::Out] {
            let z = g.mean_degrees(dir);
            for i in 0..lambda.len() {
                prop_assert!((z.z_by_class[i] - lambda[i] * p[i]).abs() < 1e-12);
            }
        }
        prop_assert!(g.is_symmetric());
    }

    #[test]
    fn empirical_means_are_edges_per_node(
        n in 1usize..30,
        es in prop::collection::vec((0usize..30, 0usize..30, 0u8..3), 0..60),
    ) {
        let edges: Vec<Edge> = es.into_iter().map(|(u, v, c)| Edge::new(u % n, v % n, c)).collect();
        let g = TypedDigraph::new(n, 3, edges.clone()).unwrap();
        let d = JointDegreeDistribution::<f64>::empirical(&g).unwrap();
        prop_assert!(d.check_balanced(1e-12).is_ok());
        for class in 0..3u8 {
            let m = edges.iter().filter(|e| e.class.0 == class).count() as f64;
            prop_assert!((d.stats().z_by_class[class as usize] - m / n as f64).abs() < 1e-12);
            prop_assert!((d.out_stats().z_by_class[class as usize] - m / n as f64).abs() < 1e-12);
        }
    }
}

/// Total out-degree of `m` independent nodes has generating function
/// `G(1; y)^m`. Checked against an explicit m-fold convolution of the
/// out-degree marginal.
#[test]
fn power_of_out_marginal_is_convolution() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let d = common::random_table(&mut rng, 2, 5, 3);
        let mut marginal: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (k, p) in d.iter() {
            *marginal.entry(k.out_by_class.clone()).or_default() += p;
        }
        let g = GenFunc::from_distribution(d);
        for m in [2usize, 3] {
            let mut conv: BTreeMap<Vec<u32>, f64> = BTreeMap::from([(vec![0, 0], 1.0)]);
            for _ in 0..m {
                let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                for (a, pa) in &conv {
                    for (b, pb) in &marginal {
                        *next.entry(vec![a[0] + b[0], a[1] + b[1]]).or_default() += pa * pb;
                    }
                }
                conv = next;
            }
            for y0 in [0.0, 0.25, 0.5, 0.75, 1.0] {
                for y1 in [0.0, 0.3, 0.6, 0.9] {
                    let lhs = g.eval(&EvalPoint::out_only(vec![y0, y1])).unwrap().powi(m as i32);
                    let rhs: f64 = conv.iter().map(|(k, p)| p * f64::powi(y0, k[0] as i32) * f64::powi(y1, k[1] as i32)).sum();
                    assert!((lhs - rhs).abs() < 1e-12, "m={m} at ({y0},{y1}): {lhs} vs {rhs}");
                }
            }
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    let d64 = JointDegreeDistribution::<f64>::new(
        1,
        [(common::dv(&[1], &[3]), 0.25), (common::dv(&[2], &[1]), 0.25), (common::dv(&[1], &[0]), 0.25), (common::dv(&[0], &[0]), 0.25)],
    )
    .unwrap();
    let d32 = JointDegreeDistribution::<f32>::from_file(&d64.to_file()).unwrap();
    let g64 = GenFunc::from_distribution(d64).occupy(&[0.7]).unwrap();
    let g32 = GenFunc::from_distribution(d32).occupy(&[0.7f32]).unwrap();
    for t in [0.0, 0.3, 0.8] {
        let a = g64.eval(&EvalPoint::new(vec![t], vec![1.0 - t])).unwrap();
        let b = g32.eval(&EvalPoint::new(vec![t as f32], vec![1.0 - t as f32])).unwrap();
        assert!((a - b as f64).abs() < 1e-6);
    }
}
