//! Monte Carlo percolation oracle on sparse multi-class Erdős–Rényi digraphs.
//!
//! Each node draws `Poisson(lambda_i)` class-`i` out-edges with uniformly
//! random targets (self-loops and parallel edges allowed), then every edge
//! is kept independently with probability `p[class]`.
//!
//! # Reproducibility
//!
//! Randomness comes from ChaCha8 keyed with `seed_from_u64(seed)`. Trial `t`
//! uses stream `4 t + k` where `k` is 0 for graph generation, 1 for edge
//! occupation and 2 for outbreak seeds. Trials therefore never share a
//! stream, and results do not depend on how trials are scheduled across
//! threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degrees::{check_classes, check_probabilities};
use crate::graph::{bow_tie_sizes, Adjacency, Edge, EdgeClassId, TypedDigraph};
use crate::{Error, Result};

pub const DEFAULT_OUTBREAK_SEEDS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_nodes: usize,
    /// Mean out-degree per class.
    pub lambda: Vec<f64>,
    pub p: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Random initial failures per graph used for the small-outbreak mean.
    #[serde(default = "default_outbreak_seeds")]
    pub outbreak_seeds: usize,
}

fn default_outbreak_seeds() -> usize {
    DEFAULT_OUTBREAK_SEEDS
}

impl SimConfig {
    pub fn new(n_nodes: usize, lambda: Vec<f64>, p: Vec<f64>, trials: usize, seed: u64) -> Self {
        SimConfig { n_nodes, lambda, p, trials, seed, outbreak_seeds: DEFAULT_OUTBREAK_SEEDS }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(Error::domain("simulation needs at least one node"));
        }
        if self.trials == 0 {
            return Err(Error::domain("simulation needs at least one trial"));
        }
        if self.outbreak_seeds == 0 {
            return Err(Error::domain("simulation needs at least one outbreak seed per graph"));
        }
        check_lambda(&self.lambda)?;
        check_probabilities(&self.p, self.lambda.len())
    }

    /// `sum_i lambda_i p_i`.
    pub fn s(&self) -> f64 {
        self.lambda.iter().zip(&self.p).map(|(l, p)| l * p).sum()
    }
}

fn check_lambda(lambda: &[f64]) -> Result<()> {
    check_classes(lambda.len())?;
    if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::domain(format!("mean degree {l} must be finite and nonnegative")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean across graphs; zero when only one graph
    /// contributes.
    pub std_err: f64,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, std_err: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate { mean, std_err: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Estimate { mean, std_err: (var / n as f64).sqrt() }
    }

    /// |mean - target| in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEstimates {
    /// Mean size of outbreaks classified small, from uniformly random seeds.
    pub mean_outbreak: Estimate,
    /// Mean of `(|GIN| + |GSCC|) / N`.
    pub p_ep_hat: Estimate,
    /// Mean of `(|GSCC| + |GOUT|) / N`.
    pub f_hat: Estimate,
    pub n_graphs: usize,
}

/// One row of the per-trial CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub gscc: usize,
    pub gin: usize,
    pub gout: usize,
    /// `None` when every sampled outbreak was giant.
    pub mean_small_outbreak: Option<f64>,
}

const STREAM_GENERATE: u64 = 0;
const STREAM_OCCUPY: u64 = 1;
const STREAM_SEEDS: u64 = 2;

/// The random stream used by trial `trial` for purpose `purpose` (0..4).
pub fn trial_rng(seed: u64, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4 * trial + purpose);
    rng
}

/// An outbreak counts as giant once it exceeds `max(100, N^(2/3))` nodes.
pub fn giant_threshold(n_nodes: usize) -> usize {
    let cut = (n_nodes as f64).powf(2.0 / 3.0).max(100.0);
    (cut + 1e-9).floor() as usize
}

pub fn generate_er<R: Rng + ?Sized>(n_nodes: usize, lambda: &[f64], rng: &mut R) -> Result<TypedDigraph> {
    check_lambda(lambda)?;
    let samplers: Vec<Option<Poisson<f64>>> = lambda
        .iter()
        .map(|&l| (l > 0.0).then(|| Poisson::new(l).expect("positive finite mean")))
        .collect();
    let expected: f64 = lambda.iter().sum::<f64>() * n_nodes as f64;
    let mut edges = Vec::with_capacity(expected as usize + 16);
    for u in 0..n_nodes {
        for (class, sampler) in samplers.iter().enumerate() {
            let Some(sampler) = sampler else { continue };
            let k = sampler.sample(rng) as usize;
            for _ in 0..k {
                let v = rng.random_range(0..n_nodes);
                edges.push(Edge { src: u, dst: v, class: EdgeClassId(class as u8) });
            }
        }
    }
    Ok(TypedDigraph::from_parts_unchecked(n_nodes, lambda.len(), edges))
}

/// Keeps each edge independently with probability `p[class]`.
pub fn occupy_sample<R: Rng + ?Sized>(g: &TypedDigraph, p: &[f64], rng: &mut R) -> Result<TypedDigraph> {
    check_probabilities(p, g.n_classes())?;
    let edges = g
        .edges()
        .iter()
        .filter(|e| rng.random::<f64>() < p[e.class.index()])
        .copied()
        .collect();
    Ok(TypedDigraph::from_parts_unchecked(g.node_count(), g.n_classes(), edges))
}

/// Breadth-first outbreak sizes that reuse one visit buffer across seeds.
struct OutbreakProbe<'a> {
    adj: &'a Adjacency,
    stamp: Vec<u32>,
    current: u32,
    queue: Vec<usize>,
}

impl<'a> OutbreakProbe<'a> {
    fn new(adj: &'a Adjacency) -> Self {
        OutbreakProbe { adj, stamp: vec![0; adj.node_count()], current: 0, queue: Vec::new() }
    }

    /// Size of the reachable set from `seed`, or `None` once it exceeds `cap`.
    fn size(&mut self, seed: usize, cap: usize) -> Option<usize> {
        self.current += 1;
        self.queue.clear();
        self.queue.push(seed);
        self.stamp[seed] = self.current;
        let mut head = 0;
        while head < self.queue.len() {
            if self.queue.len() > cap {
                return None;
            }
            let u = self.queue[head];
            head += 1;
            for &v in self.adj.successors(u) {
                if self.stamp[v] != self.current {
                    self.stamp[v] = self.current;
                    self.queue.push(v);
                }
            }
        }
        (self.queue.len() <= cap).then_some(self.queue.len())
    }
}

/// Generates, occupies and measures graph number `trial`.
pub fn run_trial(config: &SimConfig, trial: usize) -> Result<TrialRecord> {
    let t = trial as u64;
    let g = generate_er(config.n_nodes, &config.lambda, &mut trial_rng(config.seed, t, STREAM_GENERATE))?;
    let occupied = occupy_sample(&g, &config.p, &mut trial_rng(config.seed, t, STREAM_OCCUPY))?;
    drop(g);
    let mut rng = trial_rng(config.seed, t, STREAM_SEEDS);
    Ok(measure_graph(&occupied, config.outbreak_seeds, &mut rng, trial))
}

/// Bow-tie sizes of an occupied graph plus the mean size of small outbreaks
/// from `outbreak_seeds` uniformly drawn initial failures.
pub fn measure_graph<R: Rng + ?Sized>(occupied: &TypedDigraph, outbreak_seeds: usize, rng: &mut R, trial: usize) -> TrialRecord {
    let n = occupied.node_count();
    let sizes = bow_tie_sizes(occupied);
    let adj = occupied.adjacency();
    let mut probe = OutbreakProbe::new(&adj);
    let cap = giant_threshold(n);
    let (mut total, mut count) = (0usize, 0usize);
    if n > 0 {
        for _ in 0..outbreak_seeds {
            let seed = rng.random_range(0..n);
            if let Some(s) = probe.size(seed, cap) {
                total += s;
                count += 1;
            }
        }
    }
    TrialRecord {
        trial,
        gscc: sizes.gscc,
        gin: sizes.gin,
        gout: sizes.gout,
        mean_small_outbreak: (count > 0).then(|| total as f64 / count as f64),
    }
}

pub fn estimate(config: &SimConfig) -> Result<SimEstimates> {
    Ok(estimate_with_trials(config)?.0)
}

/// Runs all trials (in parallel on the current rayon pool) and aggregates
/// them in trial order.
pub fn estimate_with_trials(config: &SimConfig) -> Result<(SimEstimates, Vec<TrialRecord>)> {
    config.validate()?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((summarize(config.n_nodes, &records), records))
}

/// [`estimate_with_trials`] on a dedicated pool of `threads` workers.
pub fn estimate_with_threads(config: &SimConfig, threads: usize) -> Result<(SimEstimates, Vec<TrialRecord>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| estimate_with_trials(config))
}

/// Aggregates per-trial records. A trial whose largest SCC is not itself
/// giant (see [`giant_threshold`]) has no epidemic and contributes zero to
/// both fractions.
pub fn summarize(n_nodes: usize, records: &[TrialRecord]) -> SimEstimates {
    let n = n_nodes as f64;
    let cut = giant_threshold(n_nodes);
    let fraction = |r: &TrialRecord, side: usize| if r.gscc > cut { (r.gscc + side) as f64 / n } else { 0.0 };
    let p_ep: Vec<f64> = records.iter().map(|r| fraction(r, r.gin)).collect();
    let f: Vec<f64> = records.iter().map(|r| fraction(r, r.gout)).collect();
    let small: Vec<f64> = records.iter().filter_map(|r| r.mean_small_outbreak).collect();
    SimEstimates {
        mean_outbreak: Estimate::from_samples(&small),
        p_ep_hat: Estimate::from_samples(&p_ep),
        f_hat: Estimate::from_samples(&f),
        n_graphs: records.len(),
    }
}
