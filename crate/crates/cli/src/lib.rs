//! `netpercolate` command line: `analyze`, `simulate`, `sweep` and
//! `split-edge`.
//!
//! Every subcommand also accepts `--config FILE`, a JSON object whose keys
//! are the long flag names (`{"n-nodes": 10000, "lambda": [1.5]}`). Flags
//! given on the command line win over the file.
//!
//! Exit codes: 0 success, 1 numeric or internal failure, 2 usage or
//! validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netpercolate::analysis::{analyze, analyze_distribution, analyze_graph, Analysis};
use netpercolate::epidemic::{er_closed_form, EpidemicSummary, ErParams};
use netpercolate::genfunc::GenFunc;
use netpercolate::graph::{read_edge_list, split_edge, write_edge_list};
use netpercolate::montecarlo::{estimate_with_threads, estimate_with_trials, SimConfig, TrialRecord};
use netpercolate::outbreak::OutbreakReport;
use netpercolate::JointDegreeDistribution;
use serde::{Deserialize, Serialize};

pub const THREADS_ENV: &str = "NETPERCOLATE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<netpercolate::Error> for CliError {
    fn from(e: netpercolate::Error) -> Self {
        use netpercolate::Error as E;
        match e {
            E::IllConditioned { .. } | E::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "netpercolate", version, about = "Error propagation through networks with typed edge failure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected outbreak sizes, epidemic probability and affected fraction.
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimates on sampled Erdős–Rényi digraphs.
    Simulate(SimulateArgs),
    /// Closed-form epidemic probability over a grid of s values (CSV).
    Sweep(SweepArgs),
    /// Replace one edge by a two-edge path through a new node.
    SplitEdge(SplitEdgeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct AnalyzeArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Degree distribution JSON file.
    #[arg(long)]
    distribution: Option<PathBuf>,
    /// Poisson mean degree per class (Erdős–Rényi input).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Option<Vec<f64>>,
    /// Occupation probability per class.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SimulateArgs {
    #[arg(long)]
    n_nodes: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random initial failures per graph for the small-outbreak mean.
    #[arg(long)]
    outbreak_seeds: Option<usize>,
    /// `json` for the estimates, `csv` for per-trial rows.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SweepArgs {
    /// Grid as `from:step:to`, e.g. `1.0:0.05:2.0`.
    range: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    s_from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s_to: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s_step: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SplitEdgeArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Index of the edge in file order, starting at 0.
    #[arg(long)]
    edge: Option<usize>,
    /// When given, report the epidemic caused by the edge's failure instead
    /// of printing the split graph.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
    /// Where to write the split graph when `--p` is given.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

/// Fills every unset field of `args` from the JSON file named by its
/// `config` field.
macro_rules! merge_config {
    ($args:expr, $ty:ty, [$($field:ident),* $(,)?]) => {{
        if let Some(path) = $args.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
            let file: $ty = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
            $( if $args.$field.is_none() { $args.$field = file.$field; } )*
        }
    }};
}

/// JSON document written by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub outbreak: OutbreakReport<f64>,
    pub epidemic: EpidemicSummary<f64>,
}

impl From<Analysis<f64>> for AnalyzeOutput {
    fn from(a: Analysis<f64>) -> Self {
        AnalyzeOutput { epidemic: a.epidemic.summary(), outbreak: a.outbreak }
    }
}

/// JSON document written by `split-edge --p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEdgeOutput {
    pub new_node: usize,
    pub outbreak: OutbreakReport<f64>,
    pub epidemic: EpidemicSummary<f64>,
}

pub fn run<I, T>(argv: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}")?;
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string()));
        }
    };
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args, out),
        Command::Simulate(args) => cmd_simulate(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::SplitEdge(args) => cmd_split_edge(args, out),
    }
}

fn emit(output: Option<&Path>, out: &mut dyn Write, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
    s.push('\n');
    s
}

fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
}

fn read_graph(path: &Path) -> CliResult<netpercolate::TypedDigraph> {
    read_edge_list(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn cmd_analyze(mut args: AnalyzeArgs, out: &mut dyn Write) -> CliResult<()> {
    merge_config!(args, AnalyzeArgs, [graph, distribution, lambda, p, output]);
    let p = require(args.p, "p")?;
    let sources = [args.graph.is_some(), args.distribution.is_some(), args.lambda.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(CliError::Usage("give exactly one of --graph, --distribution or --lambda".into()));
    }
    let check_classes = |n: usize| {
        if p.len() != n {
            Err(CliError::Validation(format!("input has {n} edge classes but --p has {} values", p.len())))
        } else {
            Ok(())
        }
    };
    let analysis = if let Some(path) = &args.graph {
        let g = read_graph(path)?;
        check_classes(g.n_classes())?;
        analyze_graph(&g, &p)?
    } else if let Some(path) = &args.distribution {
        let dist = JointDegreeDistribution::read_json(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        check_classes(dist.n_classes())?;
        dist.check_balanced(1e-9)?;
        analyze_distribution(&dist, &p)?
    } else {
        let lambda = args.lambda.unwrap_or_default();
        check_classes(lambda.len())?;
        analyze(&GenFunc::poisson(lambda)?, &p)?
    };
    emit(args.output.as_deref(), out, &to_json(&AnalyzeOutput::from(analysis)))
}

fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from("trial,gscc,gin,gout,mean_small_outbreak\n");
    for r in records {
        let mean = r.mean_small_outbreak.map(|m| format!("{m:.6}")).unwrap_or_default();
        s.push_str(&format!("{},{},{},{},{}\n", r.trial, r.gscc, r.gin, r.gout, mean));
    }
    s
}

fn cmd_simulate(mut args: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    merge_config!(args, SimulateArgs, [n_nodes, lambda, p, trials, seed, outbreak_seeds, format, output]);
    let lambda = require(args.lambda, "lambda")?;
    let p = require(args.p, "p")?;
    let mut config = SimConfig::new(
        require(args.n_nodes, "n-nodes")?,
        lambda,
        p,
        args.trials.unwrap_or(20),
        args.seed.unwrap_or(0),
    );
    if let Some(k) = args.outbreak_seeds {
        config.outbreak_seeds = k;
    }
    config.validate()?;
    let (estimates, records) = match threads_from_env()? {
        Some(n) => estimate_with_threads(&config, n)?,
        None => estimate_with_trials(&config)?,
    };
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&estimates),
        Format::Csv => trials_csv(&records),
    };
    emit(args.output.as_deref(), out, &text)
}

/// One sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s: f64,
    pub p_ep: f64,
}

/// Grid `from, from + step, ...` up to and including `to` (within 1e-9 of a
/// step), with the closed-form epidemic probability at each point.
pub fn sweep(from: f64, step: f64, to: f64) -> Result<Vec<SweepPoint>, String> {
    if !(from.is_finite() && step.is_finite() && to.is_finite()) {
        return Err("sweep bounds must be finite".into());
    }
    if step.is_nan() || step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    if from > to {
        return Err(format!("from ({from}) exceeds to ({to})"));
    }
    if from < 0.0 {
        return Err(format!("s must be nonnegative, got {from}"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| {
            let s = from + k as f64 * step;
            let params = ErParams::from_s(s).expect("nonnegative s");
            SweepPoint { s, p_ep: er_closed_form(&params).p_ep }
        })
        .collect())
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("s,p_ep\n");
    for pt in points {
        s.push_str(&format!("{:.6},{:.6}\n", pt.s, pt.p_ep));
    }
    s
}

fn parse_range(range: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<&str> = range.split(':').collect();
    let bad = || CliError::Usage(format!("range `{range}` is not of the form from:step:to"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    Ok((num(parts[0])?, num(parts[1])?, num(parts[2])?))
}

fn cmd_sweep(mut args: SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    merge_config!(args, SweepArgs, [range, s_from, s_to, s_step, format, output]);
    let (from, step, to) = match &args.range {
        Some(r) => {
            if args.s_from.is_some() || args.s_to.is_some() || args.s_step.is_some() {
                return Err(CliError::Usage("give either a from:step:to range or --s-from/--s-step/--s-to".into()));
            }
            parse_range(r)?
        }
        None => (
            require(args.s_from, "s-from")?,
            require(args.s_step, "s-step")?,
            require(args.s_to, "s-to")?,
        ),
    };
    let points = sweep(from, step, to).map_err(CliError::Validation)?;
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&points),
        Format::Json => to_json(&points),
    };
    emit(args.output.as_deref(), out, &text)
}

fn cmd_split_edge(mut args: SplitEdgeArgs, out: &mut dyn Write) -> CliResult<()> {
    merge_config!(args, SplitEdgeArgs, [graph, edge, p, graph_out, output]);
    let g = read_graph(&require(args.graph, "graph")?)?;
    let edge = require(args.edge, "edge")?;
    let (split, z) = split_edge(&g, edge)?;
    let Some(p) = args.p else {
        return emit(args.output.as_deref(), out, &write_edge_list(&split));
    };
    if p.len() != g.n_classes() {
        return Err(CliError::Validation(format!(
            "graph has {} edge classes but --p has {} values",
            g.n_classes(),
            p.len()
        )));
    }
    if let Some(path) = &args.graph_out {
        std::fs::write(path, write_edge_list(&split))?;
    }
    let a = analyze_graph(&split, &p)?;
    let report = SplitEdgeOutput { new_node: z, epidemic: a.epidemic.summary(), outbreak: a.outbreak };
    emit(args.output.as_deref(), out, &to_json(&report))
}
