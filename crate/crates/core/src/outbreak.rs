//! Expected size of finite outbreaks.
//!
//! Differentiating the outbreak-size generating functions at `w = 1` gives
//! the linear system `A h' = 1` with
//! `a_ij = delta_ij - p_j * d/dy_j H_i(1..1; 1..1)`, where `H_i` is the
//! excess-degree generating function of the original network for class `i`.
//! Its solution `h'_i` is the mean outbreak size started by a failing
//! class-`i` edge; the mean size started by a failing node follows from the
//! occupied degree generating function. All of this is only meaningful below
//! threshold, that is while `A` is a nonsingular M-matrix.

use serde::{Deserialize, Serialize};

use crate::degrees::check_probabilities;
use crate::genfunc::{Direction, EvalPoint, GenFunc};
use crate::linalg::Lu;
use crate::{Error, Real, Result};

/// A leading principal minor of `A` at or below this counts as
/// supercritical.
pub const CRITICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OutbreakSystem<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    det_a: T,
    /// Smallest leading principal minor of `A`.
    min_minor: T,
    lu: Lu<T>,
}

impl<T: Real> OutbreakSystem<T> {
    pub fn a(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn det_a(&self) -> T {
        self.det_a
    }

    pub fn n_classes(&self) -> usize {
        self.b.len()
    }

    /// Solves `A x = rhs`, refusing ill-conditioned systems.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != self.b.len() {
            return Err(Error::domain(format!("right-hand side has length {}, expected {}", rhs.len(), self.b.len())));
        }
        let cond = self.lu.condition(&self.a);
        let limit = T::one() / (T::epsilon() * T::lit(1e4));
        if cond.is_nan() || cond > limit {
            return Err(Error::IllConditioned { condition: cond.as_f64() });
        }
        match self.lu.solve(rhs) {
            Some(x) if x.iter().all(|v| v.is_finite()) => Ok(x),
            _ => Err(Error::IllConditioned { condition: cond.as_f64() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutbreakReport<T> {
    pub det_a: T,
    pub supercritical: bool,
    /// Mean outbreak size after a class-`i` edge fails; `None` when
    /// supercritical.
    pub e_s_by_class: Option<Vec<T>>,
    /// Mean outbreak size after a random node fails; `None` when
    /// supercritical.
    pub e_s_node: Option<T>,
}

/// Assembles `A` from the excess generating functions of the original
/// network (one per class) and the occupation probabilities.
pub fn build_system<T: Real>(excess_fns: &[GenFunc<T>], p: &[T]) -> Result<OutbreakSystem<T>> {
    let n = excess_fns.len();
    check_probabilities(p, n)?;
    if let Some(h) = excess_fns.iter().find(|h| h.n_classes() != n) {
        return Err(Error::domain(format!(
            "excess function has {} classes but {n} functions were given",
            h.n_classes()
        )));
    }
    let ones = EvalPoint::ones(n);
    let mut a = vec![vec![T::zero(); n]; n];
    for (i, h) in excess_fns.iter().enumerate() {
        let total = h.eval(&ones)?;
        if (total - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::domain(format!("excess function {i} is not normalised (sums to {total})")));
        }
        for j in 0..n {
            let slope = h.partial(Direction::Out, j, &ones)? * p[j];
            a[i][j] = if i == j { T::one() - slope } else { -slope };
        }
    }
    let lu = Lu::factor(&a);
    let min_minor = (1..n)
        .map(|k| Lu::factor(&a[..k].iter().map(|row| row[..k].to_vec()).collect::<Vec<_>>()).det())
        .fold(lu.det(), T::min);
    Ok(OutbreakSystem { det_a: lu.det(), min_minor, a, b: vec![T::one(); n], lu })
}

/// [`build_system`] with the excess functions derived from the original
/// network's degree generating function. Fails with
/// [`Error::DegenerateClass`] for a class without edges.
pub fn build_system_from<T: Real>(original: &GenFunc<T>, p: &[T]) -> Result<OutbreakSystem<T>> {
    let excess = (0..original.n_classes()).map(|i| original.excess(i)).collect::<Result<Vec<_>>>()?;
    build_system(&excess, p)
}

/// True when the system is strictly subcritical: every leading principal
/// minor of `A` exceeds 1e-9. `A` has nonpositive off-diagonal entries, so
/// this holds exactly when the spectral radius of `I - A` is below one. For
/// one class it is the test `det A > 1e-9`; with several classes `det A` alone
/// can be positive while two eigenvalues have crossed one.
pub fn criticality<T: Real>(sys: &OutbreakSystem<T>) -> bool {
    sys.min_minor > T::tol(CRITICALITY_TOL)
}

/// Mean outbreak sizes below threshold. `occupied` is the degree generating
/// function of the occupied network.
pub fn expected_sizes<T: Real>(sys: &OutbreakSystem<T>, occupied: &GenFunc<T>, p: &[T]) -> Result<OutbreakReport<T>> {
    let n = sys.n_classes();
    check_probabilities(p, n)?;
    if occupied.n_classes() != n {
        return Err(Error::domain(format!(
            "occupied generating function has {} classes, system has {n}",
            occupied.n_classes()
        )));
    }
    if !criticality(sys) {
        return Ok(OutbreakReport { det_a: sys.det_a, supercritical: true, e_s_by_class: None, e_s_node: None });
    }
    let h = sys.solve(&sys.b)?;
    let out_means = occupied.mean_degrees(Direction::Out).z_by_class;
    let e_s_node = T::one() + out_means.iter().zip(&h).map(|(&z, &hj)| z * hj).sum::<T>();
    Ok(OutbreakReport { det_a: sys.det_a, supercritical: false, e_s_by_class: Some(h), e_s_node: Some(e_s_node) })
}
