//! Large outbreaks above threshold.
//!
//! `H_i(1)` (forward) and `H^d_i(1)` (reversed network) are the
//! probabilities that following an occupied class-`i` edge forward,
//! respectively backward, reaches only finitely many nodes. They solve
//!
//! ```text
//! H_i   = d/dx_i G(1..1; H) / z_i
//! H^d_i = d/dy_i G(H^d; 1..1) / z_i
//! ```
//!
//! with `G` the occupied degree generating function. The epidemic
//! probability is `1 - G(1..1; H)` and the affected fraction is
//! `1 - G(H^d; 1..1)`.

use serde::{Deserialize, Serialize};

use crate::degrees::{check_probabilities, DegreeStats};
use crate::genfunc::{Direction, EvalPoint, GenFunc};
use crate::graph::{split_edge, TypedDigraph};
use crate::outbreak::OutbreakReport;
use crate::{Error, Real, Result};

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions<T> {
    /// Stop once successive iterates differ by at most this in sup-norm.
    pub tol: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for FixedPointOptions<T> {
    fn default() -> Self {
        FixedPointOptions { tol: T::tol(FIXED_POINT_TOL), max_iterations: FIXED_POINT_MAX_ITER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult<T> {
    pub h: Vec<T>,
    pub iterations: usize,
    /// `max_i |h_i - Phi_i(h)|` at the returned point.
    pub residual: T,
    pub converged: bool,
}

impl<T: Real> FixedPointResult<T> {
    fn trivial(n: usize) -> Self {
        FixedPointResult { h: vec![T::one(); n], iterations: 0, residual: T::zero(), converged: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicReport<T> {
    pub p_ep: T,
    pub f: T,
    pub h_forward: FixedPointResult<T>,
    pub h_dual: FixedPointResult<T>,
}

/// Flat serialised form of an [`EpidemicReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicSummary<T> {
    pub p_ep: T,
    pub f: T,
    pub converged: bool,
    /// Total iterations over both fixed-point solves.
    pub iterations: usize,
    pub h_forward: Vec<T>,
    pub h_dual: Vec<T>,
}

impl<T: Real> EpidemicReport<T> {
    fn subcritical(n: usize) -> Self {
        EpidemicReport {
            p_ep: T::zero(),
            f: T::zero(),
            h_forward: FixedPointResult::trivial(n),
            h_dual: FixedPointResult::trivial(n),
        }
    }

    pub fn summary(&self) -> EpidemicSummary<T> {
        EpidemicSummary {
            p_ep: self.p_ep,
            f: self.f,
            converged: self.h_forward.converged && self.h_dual.converged,
            iterations: self.h_forward.iterations + self.h_dual.iterations,
            h_forward: self.h_forward.h.clone(),
            h_dual: self.h_dual.h.clone(),
        }
    }
}

fn clamp_unit<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Least fixed point of a monotone map on `[0,1]^n`, by plain iteration from
/// the origin. Inactive coordinates are pinned at 1.
fn least_fixed_point<T: Real>(
    active: &[bool],
    phi: impl Fn(&[T]) -> Result<Vec<T>>,
    opts: FixedPointOptions<T>,
) -> Result<FixedPointResult<T>> {
    let pin = |v: Vec<T>| -> Vec<T> {
        v.into_iter()
            .zip(active)
            .map(|(x, &a)| if a { clamp_unit(x) } else { T::one() })
            .collect()
    };
    let sup = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).fold(T::zero(), T::max);

    let mut h: Vec<T> = active.iter().map(|&a| if a { T::zero() } else { T::one() }).collect();
    let mut step = T::infinity();
    for it in 1..=opts.max_iterations {
        let next = pin(phi(&h)?);
        step = sup(&next, &h);
        h = next;
        if step <= opts.tol {
            let residual = sup(&h, &pin(phi(&h)?));
            return Ok(FixedPointResult { h, iterations: it, residual, converged: true });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: step.as_f64() })
}

fn active_classes<T: Real>(occupied: &GenFunc<T>, z: &DegreeStats<T>) -> Result<Vec<bool>> {
    if z.n_classes() != occupied.n_classes() {
        return Err(Error::domain(format!(
            "degree statistics have {} classes, generating function has {}",
            z.n_classes(),
            occupied.n_classes()
        )));
    }
    Ok(z.z_by_class.iter().map(|&zi| zi > T::zero()).collect())
}

/// Solves the reversed-network system for `H^d(1)`. Classes with `z_i = 0`
/// carry no occupied edges and are held at 1.
pub fn solve_dual_fixed_point<T: Real>(occupied: &GenFunc<T>, z: &DegreeStats<T>) -> Result<FixedPointResult<T>> {
    solve_dual_fixed_point_with(occupied, z, FixedPointOptions::default())
}

pub fn solve_dual_fixed_point_with<T: Real>(
    occupied: &GenFunc<T>,
    z: &DegreeStats<T>,
    opts: FixedPointOptions<T>,
) -> Result<FixedPointResult<T>> {
    let active = active_classes(occupied, z)?;
    least_fixed_point(
        &active,
        |h| {
            let pt = EvalPoint::in_only(h.to_vec());
            (0..h.len())
                .map(|i| {
                    if !active[i] {
                        return Ok(T::one());
                    }
                    Ok(occupied.partial(Direction::Out, i, &pt)? / z.z_by_class[i])
                })
                .collect()
        },
        opts,
    )
}

/// Solves the forward system for `H(1)`.
pub fn solve_forward_fixed_point<T: Real>(occupied: &GenFunc<T>, z: &DegreeStats<T>) -> Result<FixedPointResult<T>> {
    solve_forward_fixed_point_with(occupied, z, FixedPointOptions::default())
}

pub fn solve_forward_fixed_point_with<T: Real>(
    occupied: &GenFunc<T>,
    z: &DegreeStats<T>,
    opts: FixedPointOptions<T>,
) -> Result<FixedPointResult<T>> {
    let active = active_classes(occupied, z)?;
    least_fixed_point(
        &active,
        |h| {
            let pt = EvalPoint::out_only(h.to_vec());
            (0..h.len())
                .map(|i| {
                    if !active[i] {
                        return Ok(T::one());
                    }
                    Ok(occupied.partial(Direction::In, i, &pt)? / z.z_by_class[i])
                })
                .collect()
        },
        opts,
    )
}

/// Epidemic probability and affected fraction. Below threshold (as decided
/// by `outbreak`) both are zero and no fixed point is solved.
pub fn epidemic_report<T: Real>(
    occupied: &GenFunc<T>,
    z: &DegreeStats<T>,
    outbreak: &OutbreakReport<T>,
) -> Result<EpidemicReport<T>> {
    let n = occupied.n_classes();
    if !outbreak.supercritical {
        return Ok(EpidemicReport::subcritical(n));
    }
    let h_forward = solve_forward_fixed_point(occupied, z)?;
    let h_dual = if occupied.is_symmetric() {
        h_forward.clone()
    } else {
        solve_dual_fixed_point(occupied, z)?
    };
    let p_ep = clamp_unit(T::one() - occupied.eval(&EvalPoint::out_only(h_forward.h.clone()))?);
    let f = clamp_unit(T::one() - occupied.eval(&EvalPoint::in_only(h_dual.h.clone()))?);
    Ok(EpidemicReport { p_ep, f, h_forward, h_dual })
}

/// Parameters of the multi-class Erdős–Rényi closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErParams<T> {
    pub lambda: Vec<T>,
    pub p: Vec<T>,
    /// `sum_i lambda_i p_i`, the mean number of occupied out-edges.
    pub s: T,
}

impl<T: Real> ErParams<T> {
    pub fn new(lambda: Vec<T>, p: Vec<T>) -> Result<Self> {
        if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= T::zero())) {
            return Err(Error::domain(format!("mean degree {l} must be finite and nonnegative")));
        }
        check_probabilities(&p, lambda.len())?;
        let s = lambda.iter().zip(&p).map(|(&l, &q)| l * q).sum();
        Ok(ErParams { lambda, p, s })
    }

    /// Single-class parameters with `s` itself as the mean degree.
    pub fn from_s(s: T) -> Result<Self> {
        Self::new(vec![s], vec![T::one()])
    }
}

/// `1 + W(-s e^{-s}) / s` above threshold, zero at or below it.
pub fn er_closed_form<T: Real>(params: &ErParams<T>) -> EpidemicReport<T> {
    let n = params.lambda.len().max(1);
    let s = params.s;
    if s <= T::one() {
        return EpidemicReport::subcritical(n);
    }
    let branch = -T::one().exp().recip();
    let arg = (-s * (-s).exp()).max(branch);
    let w = lambert_w0(arg).expect("argument clamped into the principal branch domain");
    let p_ep = clamp_unit(T::one() + w / s);
    let big_h = T::one() - p_ep;
    let fp = FixedPointResult {
        h: vec![big_h; n],
        iterations: 0,
        residual: (big_h - (s * (big_h - T::one())).exp()).abs(),
        converged: true,
    };
    EpidemicReport { p_ep, f: p_ep, h_forward: fp.clone(), h_dual: fp }
}

/// Principal branch of the Lambert W function on `[-1/e, inf)`.
///
/// Halley iteration from a branch-point series (near `-1/e`), a logarithmic
/// approximation (small `z`) or the asymptotic expansion (large `z`). For
/// negative `z` a bisection on `[-1, 0]` backs it up.
pub fn lambert_w0<T: Real>(z: T) -> Result<T> {
    let one = T::one();
    let e = one.exp();
    let branch = -e.recip();
    if z.is_nan() || z < branch {
        return Err(Error::domain(format!("Lambert W0 is undefined for z = {z} < -1/e")));
    }
    if z == T::zero() {
        return Ok(T::zero());
    }
    if z == branch {
        return Ok(-one);
    }
    if z.is_infinite() {
        return Ok(z);
    }

    let mut w = if z < T::lit(-0.25) {
        let p = (T::lit(2.0) * (e * z + one)).max(T::zero()).sqrt();
        -one + p - p * p / T::lit(3.0) + T::lit(11.0 / 72.0) * p * p * p
    } else if z < T::lit(3.0) {
        let l = z.ln_1p();
        l * (one - (one + l).ln() / (T::lit(2.0) + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    let target = T::tol(1e-12) * z.abs().max(one);
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= target * T::lit(1e-2) {
            break;
        }
        let wp1 = w + one;
        if wp1 <= T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + T::lit(2.0)) * f / (T::lit(2.0) * wp1);
        let next = w - f / denom;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= T::epsilon() * w.abs().max(T::epsilon());
        w = next;
        if done {
            break;
        }
    }

    let ok = |w: T| w.is_finite() && w >= -one && (w * w.exp() - z).abs() <= target;
    if ok(w) {
        return Ok(w);
    }
    if z < T::zero() {
        let (mut lo, mut hi) = (-one, T::zero());
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid == lo || mid == hi {
                break;
            }
            if mid * mid.exp() < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let candidates = [lo, hi];
        let best = candidates
            .into_iter()
            .min_by(|a, b| {
                let ra = (*a * a.exp() - z).abs();
                let rb = (*b * b.exp() - z).abs();
                ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        return Ok(best);
    }
    Ok(w.max(-one))
}

/// Epidemic report for the failure of edge `edge`: the edge is split by a
/// fresh node and the empirical pipeline is run on the resulting graph.
pub fn edge_failure_epidemic<T: Real>(g: &TypedDigraph, edge: usize, p: &[T]) -> Result<EpidemicReport<T>> {
    let (split, _) = split_edge(g, edge)?;
    Ok(crate::analysis::analyze_graph(&split, p)?.epidemic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outbreak::{build_system_from, expected_sizes};

    fn er_pipeline(lambda: &[f64], p: &[f64]) -> EpidemicReport<f64> {
        let g = GenFunc::poisson(lambda.to_vec()).unwrap();
        let occ = g.occupy(p).unwrap();
        let sys = build_system_from(&g, p).unwrap();
        let ob = expected_sizes(&sys, &occ, p).unwrap();
        let z = occ.mean_degrees(Direction::Out);
        epidemic_report(&occ, &z, &ob).unwrap()
    }

    #[test]
    fn subcritical_fixed_point_is_one() {
        let occ = GenFunc::<f64>::poisson(vec![1.4]).unwrap().occupy(&[0.5]).unwrap();
        let z = occ.mean_degrees(Direction::Out);
        let r = solve_dual_fixed_point(&occ, &z).unwrap();
        assert!((r.h[0] - 1.0).abs() < 1e-10, "{:?}", r);
        let r = solve_forward_fixed_point(&occ, &z).unwrap();
        assert!((r.h[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn supercritical_fixed_points() {
        for (s, want) in [(1.5, 1.0 - 0.582812), (2.0, 1.0 - 0.796812)] {
            let occ = GenFunc::<f64>::poisson(vec![s]).unwrap().occupy(&[1.0]).unwrap();
            let z = occ.mean_degrees(Direction::Out);
            let d = solve_dual_fixed_point(&occ, &z).unwrap();
            let f = solve_forward_fixed_point(&occ, &z).unwrap();
            assert!(d.converged && d.residual <= 1e-12);
            assert!((d.h[0] - want).abs() < 5e-6, "{s}: {}", d.h[0]);
            assert_eq!(d.h, f.h);
        }
    }

    #[test]
    fn report_values() {
        let r = er_pipeline(&[0.8, 0.6], &[0.5, 0.5]);
        assert_eq!((r.p_ep, r.f), (0.0, 0.0));
        for (s, want) in [(1.5, 0.582812), (1.05, 0.0937018)] {
            let r = er_pipeline(&[s], &[1.0]);
            assert!((r.p_ep - want).abs() < 5e-7, "{s}: {}", r.p_ep);
            assert_eq!(r.p_ep, r.f);
        }
    }

    #[test]
    fn closed_form_values() {
        for (s, want) in [(1.0, 0.0), (1.2, 0.313698), (2.0, 0.796812), (0.5, 0.0)] {
            let r = er_closed_form(&ErParams::<f64>::from_s(s).unwrap());
            assert!((r.p_ep - want).abs() < 5e-7, "{s}: {}", r.p_ep);
            assert_eq!(r.p_ep, r.f);
        }
    }

    #[test]
    fn lambert_w_points() {
        assert_eq!(lambert_w0(0.0f64).unwrap(), 0.0);
        assert_eq!(lambert_w0(-(-1.0f64).exp()).unwrap(), -1.0);
        assert!(lambert_w0(-0.37f64).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
        let w = lambert_w0(-2.0 * (-2.0f64).exp()).unwrap();
        assert!((w - -0.406376).abs() < 1e-6, "{w}");
        assert!((lambert_w0(1.0f64).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
        let big = lambert_w0(1e6f64).unwrap();
        assert!((big * big.exp() - 1e6).abs() <= 1e-12 * 1e6);
    }

    #[test]
    fn lambert_w_f32() {
        let w = lambert_w0(1.0f32).unwrap();
        assert!((w - 0.567_143_3).abs() < 1e-6);
    }

    #[test]
    fn exact_threshold_does_not_converge() {
        let occ = GenFunc::poisson(vec![1.0]).unwrap();
        let z = occ.mean_degrees(Direction::Out);
        let opts = FixedPointOptions { tol: 1e-12, max_iterations: 10_000 };
        assert!(matches!(
            solve_dual_fixed_point_with(&occ, &z, opts),
            Err(Error::NoConvergence { iterations: 10_000, .. })
        ));
    }

    #[test]
    fn zero_mean_class_is_pinned() {
        let occ = GenFunc::<f64>::poisson(vec![2.0, 1.0]).unwrap().occupy(&[1.0, 0.0]).unwrap();
        let z = occ.mean_degrees(Direction::Out);
        assert_eq!(z.z_by_class[1], 0.0);
        let r = solve_forward_fixed_point(&occ, &z).unwrap();
        assert_eq!(r.h[1], 1.0);
        assert!((r.h[0] - (1.0 - 0.796812)).abs() < 5e-6);
    }

    #[test]
    fn summary_json() {
        let r = er_closed_form(&ErParams::from_s(1.5).unwrap());
        let v = serde_json::to_value(r.summary()).unwrap();
        for key in ["p_ep", "f", "converged", "iterations", "h_forward", "h_dual"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
