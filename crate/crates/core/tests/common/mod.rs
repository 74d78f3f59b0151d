#![allow(dead_code, clippy::needless_range_loop)]

use netpercolate::degrees::{DegreeVector, JointDegreeDistribution};
use netpercolate::graph::{Edge, EdgeClassId, TypedDigraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Configuration-model digraph with exactly `count` nodes of each listed
/// degree vector. Per class, out-stubs are paired with a random permutation
/// of in-stubs, so the totals must agree.
pub fn configuration_graph<R: Rng>(counts: &[(DegreeVector, usize)], rng: &mut R) -> TypedDigraph {
    let n_classes = counts[0].0.n_classes();
    let mut nodes = Vec::new();
    for (d, c) in counts {
        nodes.extend(std::iter::repeat_n(d.clone(), *c));
    }
    let mut edges = Vec::new();
    for class in 0..n_classes {
        let mut outs = Vec::new();
        let mut ins = Vec::new();
        for (u, d) in nodes.iter().enumerate() {
            outs.extend(std::iter::repeat_n(u, d.out_by_class[class] as usize));
            ins.extend(std::iter::repeat_n(u, d.in_by_class[class] as usize));
        }
        assert_eq!(outs.len(), ins.len(), "class {class} stubs do not balance");
        ins.shuffle(rng);
        edges.extend(outs.into_iter().zip(ins).map(|(u, v)| Edge { src: u, dst: v, class: EdgeClassId(class as u8) }));
    }
    TypedDigraph::new(nodes.len(), n_classes, edges).unwrap()
}

/// Node counts for `n` nodes drawn in exact proportion from `dist`, whose
/// probabilities must all be multiples of `1/n`.
pub fn exact_counts(dist: &JointDegreeDistribution<f64>, n: usize) -> Vec<(DegreeVector, usize)> {
    dist.iter()
        .map(|(d, p)| {
            let c = p * n as f64;
            assert!((c - c.round()).abs() < 1e-9, "{p} is not a multiple of 1/{n}");
            (d.clone(), c.round() as usize)
        })
        .collect()
}

pub fn dv(i: &[u32], o: &[u32]) -> DegreeVector {
    DegreeVector::new(i.to_vec(), o.to_vec())
}

/// Random small distribution: up to `max_atoms` atoms, degrees up to
/// `max_deg`, weights from the RNG.
pub fn random_table<R: Rng>(rng: &mut R, n_classes: usize, max_atoms: usize, max_deg: u32) -> JointDegreeDistribution<f64> {
    let atoms = rng.random_range(1..=max_atoms);
    let mut entries = Vec::new();
    for _ in 0..atoms {
        let i = (0..n_classes).map(|_| rng.random_range(0..=max_deg)).collect();
        let o = (0..n_classes).map(|_| rng.random_range(0..=max_deg)).collect();
        entries.push((DegreeVector::new(i, o), rng.random_range(0.05..1.0)));
    }
    let total: f64 = entries.iter().map(|e| e.1).sum();
    JointDegreeDistribution::new(n_classes, entries.into_iter().map(|(d, w)| (d, w / total))).unwrap()
}

/// Transitive closure by repeated squaring of the boolean adjacency matrix.
pub fn closure(g: &TypedDigraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut r = vec![vec![false; n]; n];
    for u in 0..n {
        r[u][u] = true;
    }
    for e in g.edges() {
        r[e.src][e.dst] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}
