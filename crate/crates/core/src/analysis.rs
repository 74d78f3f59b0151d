//! End-to-end analytic pipeline: original degree law and occupation
//! probabilities in, outbreak and epidemic reports out.

use serde::{Deserialize, Serialize};

use crate::degrees::JointDegreeDistribution;
use crate::epidemic::{epidemic_report, EpidemicReport};
use crate::genfunc::{Direction, GenFunc};
use crate::graph::TypedDigraph;
use crate::outbreak::{build_system_from, expected_sizes, OutbreakReport};
use crate::{Real, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis<T> {
    pub outbreak: OutbreakReport<T>,
    pub epidemic: EpidemicReport<T>,
}

pub fn analyze<T: Real>(original: &GenFunc<T>, p: &[T]) -> Result<Analysis<T>> {
    let sys = build_system_from(original, p)?;
    let occupied = original.occupy(p)?;
    let outbreak = expected_sizes(&sys, &occupied, p)?;
    let z = occupied.mean_degrees(Direction::In);
    let epidemic = epidemic_report(&occupied, &z, &outbreak)?;
    Ok(Analysis { outbreak, epidemic })
}

pub fn analyze_distribution<T: Real>(dist: &JointDegreeDistribution<T>, p: &[T]) -> Result<Analysis<T>> {
    analyze(&GenFunc::from_distribution(dist.clone()), p)
}

/// Runs the pipeline on the empirical degree distribution of `g`.
pub fn analyze_graph<T: Real>(g: &TypedDigraph, p: &[T]) -> Result<Analysis<T>> {
    analyze_distribution(&JointDegreeDistribution::empirical(g)?, p)
}
