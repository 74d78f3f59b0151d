//! Error propagation through directed networks whose edges fall into
//! heterogeneous failure classes.
//!
//! The analytic side works with multivariate probability generating
//! functions over per-class in/out degrees: [`outbreak`] gives expected
//! finite outbreak sizes and the criticality test, [`epidemic`] gives the
//! epidemic probability and the affected fraction above threshold. The
//! [`montecarlo`] module is an independent stochastic oracle built on
//! [`graph`] reachability and bow-tie decomposition.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the tolerances
//! quoted in the docs assume.

pub mod analysis;
pub mod degrees;
pub mod epidemic;
pub mod error;
pub mod genfunc;
pub mod graph;
mod linalg;
pub mod montecarlo;
pub mod outbreak;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{ComponentDecomposition, Edge, EdgeClassId, TypedDigraph};
pub use scalar::Real;

/// Maximum number of edge classes a distribution may declare.
pub const MAX_CLASSES: usize = 8;

pub type DegreeVector = degrees::DegreeVector;
pub type JointDegreeDistribution = degrees::JointDegreeDistribution<f64>;
pub type DegreeStats = degrees::DegreeStats<f64>;
pub type GenFunc = genfunc::GenFunc<f64>;
pub type EvalPoint = genfunc::EvalPoint<f64>;
pub type OutbreakSystem = outbreak::OutbreakSystem<f64>;
pub type OutbreakReport = outbreak::OutbreakReport<f64>;
pub type FixedPointResult = epidemic::FixedPointResult<f64>;
pub type EpidemicReport = epidemic::EpidemicReport<f64>;
pub type ErParams = epidemic::ErParams<f64>;
pub type Analysis = analysis::Analysis<f64>;

pub type JointDegreeDistribution32 = degrees::JointDegreeDistribution<f32>;
pub type GenFunc32 = genfunc::GenFunc<f32>;
pub type EpidemicReport32 = epidemic::EpidemicReport<f32>;
