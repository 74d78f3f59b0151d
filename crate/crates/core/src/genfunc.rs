//! Multivariate probability generating functions in `2n` variables.
//!
//! A [`GenFunc`] is a kernel, either a finite table or the product-Poisson
//! closed form `prod_i exp(lambda_i (x_i + y_i - 2))`, composed with a
//! per-variable affine substitution `x_i <- a_i + b_i x_i` (and likewise for
//! `y_i`). Every substitution kept here fixes the all-ones point
//! (`a_i + b_i = 1`), which is what edge occupation produces, so evaluation
//! at all-ones is always 1.
//!
//! The `x` block tracks in-degrees, the `y` block out-degrees.

use std::sync::Arc;

use crate::degrees::{check_classes, check_probabilities, DegreeStats, DegreeVector, JointDegreeDistribution};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The `x` variables.
    In,
    /// The `y` variables.
    Out,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel<T> {
    Table(JointDegreeDistribution<T>),
    Poisson(Vec<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Affine<T> {
    offset: T,
    scale: T,
}

impl<T: Real> Affine<T> {
    fn identity() -> Self {
        Affine { offset: T::zero(), scale: T::one() }
    }

    fn apply(self, t: T) -> T {
        self.offset + self.scale * t
    }

    /// `self` applied after the substitution `t <- 1 - p + p t`.
    fn occupy(self, p: T) -> Self {
        Affine { offset: self.offset + self.scale * (T::one() - p), scale: self.scale * p }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> EvalPoint<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Self {
        EvalPoint { x, y }
    }

    pub fn ones(n: usize) -> Self {
        EvalPoint { x: vec![T::one(); n], y: vec![T::one(); n] }
    }

    /// Point with `x = (1,..,1)` and the given `y`.
    pub fn out_only(y: Vec<T>) -> Self {
        EvalPoint { x: vec![T::one(); y.len()], y }
    }

    /// Point with the given `x` and `y = (1,..,1)`.
    pub fn in_only(x: Vec<T>) -> Self {
        EvalPoint { y: vec![T::one(); x.len()], x }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenFunc<T> {
    kernel: Arc<Kernel<T>>,
    x_shift: Vec<Affine<T>>,
    y_shift: Vec<Affine<T>>,
}

impl<T: Real> GenFunc<T> {
    fn with_kernel(kernel: Kernel<T>, n: usize) -> Self {
        GenFunc {
            kernel: Arc::new(kernel),
            x_shift: vec![Affine::identity(); n],
            y_shift: vec![Affine::identity(); n],
        }
    }

    pub fn from_distribution(dist: JointDegreeDistribution<T>) -> Self {
        let n = dist.n_classes();
        Self::with_kernel(Kernel::Table(dist), n)
    }

    /// Independent Poisson in- and out-degrees with mean `lambda[i]` per class.
    pub fn poisson(lambda: Vec<T>) -> Result<Self> {
        check_classes(lambda.len())?;
        if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= T::zero())) {
            return Err(Error::domain(format!("Poisson mean {l} must be finite and nonnegative")));
        }
        let n = lambda.len();
        Ok(Self::with_kernel(Kernel::Poisson(lambda), n))
    }

    /// Erdős–Rényi digraph on `nodes` nodes where a class-`i` edge exists
    /// between an ordered pair with probability `q[i]`; in the sparse limit the
    /// degrees are Poisson with mean `nodes * q[i]`.
    pub fn erdos_renyi(nodes: usize, q: &[T]) -> Result<Self> {
        let size = T::from_usize(nodes).ok_or_else(|| Error::domain("network size not representable"))?;
        if let Some(qi) = q.iter().find(|q| !(**q >= T::zero() && **q <= T::one())) {
            return Err(Error::domain(format!("edge probability {qi} is outside [0, 1]")));
        }
        Self::poisson(q.iter().map(|&qi| size * qi).collect())
    }

    pub fn n_classes(&self) -> usize {
        self.x_shift.len()
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    fn check_point(&self, pt: &EvalPoint<T>) -> Result<()> {
        let n = self.n_classes();
        if pt.x.len() != n || pt.y.len() != n {
            return Err(Error::domain(format!(
                "evaluation point has {}+{} coordinates, expected {n}+{n}",
                pt.x.len(),
                pt.y.len()
            )));
        }
        if let Some(c) = pt.x.iter().chain(&pt.y).find(|c| !(**c >= T::zero() && **c <= T::one())) {
            return Err(Error::domain(format!("coordinate {c} is outside [0, 1]")));
        }
        Ok(())
    }

    fn shifted(&self, pt: &EvalPoint<T>) -> (Vec<T>, Vec<T>) {
        let u = self.x_shift.iter().zip(&pt.x).map(|(s, &t)| s.apply(t)).collect();
        let v = self.y_shift.iter().zip(&pt.y).map(|(s, &t)| s.apply(t)).collect();
        (u, v)
    }

    pub fn eval(&self, pt: &EvalPoint<T>) -> Result<T> {
        self.check_point(pt)?;
        let (u, v) = self.shifted(pt);
        Ok(match &*self.kernel {
            Kernel::Poisson(lambda) => poisson_exponent(lambda, &u, &v).exp(),
            Kernel::Table(dist) => dist.iter().map(|(d, p)| p * monomial(d, &u, &v)).sum(),
        })
    }

    /// First partial derivative with respect to `x_class` (`In`) or
    /// `y_class` (`Out`), computed analytically.
    pub fn partial(&self, dir: Direction, class: usize, pt: &EvalPoint<T>) -> Result<T> {
        self.check_point(pt)?;
        if class >= self.n_classes() {
            return Err(Error::domain(format!("class {class} out of range 0..{}", self.n_classes())));
        }
        let (u, v) = self.shifted(pt);
        let chain = match dir {
            Direction::In => self.x_shift[class].scale,
            Direction::Out => self.y_shift[class].scale,
        };
        let inner = match &*self.kernel {
            Kernel::Poisson(lambda) => lambda[class] * poisson_exponent(lambda, &u, &v).exp(),
            Kernel::Table(dist) => dist
                .iter()
                .map(|(d, p)| {
                    let (deg, base) = match dir {
                        Direction::In => (d.in_by_class[class], u[class]),
                        Direction::Out => (d.out_by_class[class], v[class]),
                    };
                    if deg == 0 {
                        return T::zero();
                    }
                    let rest = monomial_except(d, &u, &v, dir, class);
                    p * T::from_u32(deg).unwrap() * base.powi(deg as i32 - 1) * rest
                })
                .sum(),
        };
        Ok(chain * inner)
    }

    /// Mean degree per class in the given direction: the partials at
    /// all-ones.
    pub fn mean_degrees(&self, dir: Direction) -> DegreeStats<T> {
        let ones = EvalPoint::ones(self.n_classes());
        DegreeStats {
            z_by_class: (0..self.n_classes())
                .map(|i| self.partial(dir, i, &ones).expect("all-ones is in the domain"))
                .collect(),
        }
    }

    /// Generating function of the remaining degree of a node reached along
    /// an incoming class-`class` edge: `d/dx_class G / z_class`.
    pub fn excess(&self, class: usize) -> Result<Self> {
        if class >= self.n_classes() {
            return Err(Error::domain(format!("class {class} out of range 0..{}", self.n_classes())));
        }
        if self.x_shift[class].scale == T::zero() {
            return Err(Error::DegenerateClass { class });
        }
        // Substitutions fix all-ones, so the normalising constant factors as
        // scale * (kernel mean) and the excess of the composition is the
        // composition of the kernel's excess.
        let kernel = match &*self.kernel {
            Kernel::Poisson(lambda) => {
                if lambda[class] == T::zero() {
                    return Err(Error::DegenerateClass { class });
                }
                Arc::clone(&self.kernel)
            }
            Kernel::Table(dist) => {
                let z = dist.stats().z_by_class[class];
                if z == T::zero() {
                    return Err(Error::DegenerateClass { class });
                }
                let entries = dist.iter().filter(|(d, _)| d.in_by_class[class] > 0).map(|(d, p)| {
                    let mut reduced = d.clone();
                    reduced.in_by_class[class] -= 1;
                    (reduced, p * T::from_u32(d.in_by_class[class]).unwrap() / z)
                });
                Arc::new(Kernel::Table(JointDegreeDistribution::new(dist.n_classes(), entries)?))
            }
        };
        Ok(GenFunc { kernel, x_shift: self.x_shift.clone(), y_shift: self.y_shift.clone() })
    }

    /// Generating function of the occupied network when each class-`i` edge
    /// independently survives with probability `p[i]`.
    pub fn occupy(&self, p: &[T]) -> Result<Self> {
        check_probabilities(p, self.n_classes())?;
        Ok(GenFunc {
            kernel: Arc::clone(&self.kernel),
            x_shift: self.x_shift.iter().zip(p).map(|(s, &pi)| s.occupy(pi)).collect(),
            y_shift: self.y_shift.iter().zip(p).map(|(s, &pi)| s.occupy(pi)).collect(),
        })
    }

    /// Generating function of the reversed network: `G^d(x; y) = G(y; x)`.
    pub fn dual(&self) -> Self {
        let kernel = match &*self.kernel {
            Kernel::Poisson(_) => Arc::clone(&self.kernel),
            Kernel::Table(dist) => Arc::new(Kernel::Table(dist.swapped())),
        };
        GenFunc { kernel, x_shift: self.y_shift.clone(), y_shift: self.x_shift.clone() }
    }

    /// True when `G(x; y) = G(y; x)` identically.
    pub fn is_symmetric(&self) -> bool {
        if self.x_shift != self.y_shift {
            return false;
        }
        match &*self.kernel {
            Kernel::Poisson(_) => true,
            Kernel::Table(dist) => dist.iter().all(|(d, p)| dist.get(&d.swapped()) == p),
        }
    }
}

fn poisson_exponent<T: Real>(lambda: &[T], u: &[T], v: &[T]) -> T {
    let two = T::lit(2.0);
    lambda.iter().zip(u.iter().zip(v)).map(|(&l, (&a, &b))| l * (a + b - two)).sum()
}

fn monomial<T: Real>(d: &DegreeVector, u: &[T], v: &[T]) -> T {
    let mut m = T::one();
    for i in 0..u.len() {
        m *= u[i].powi(d.in_by_class[i] as i32) * v[i].powi(d.out_by_class[i] as i32);
    }
    m
}

fn monomial_except<T: Real>(d: &DegreeVector, u: &[T], v: &[T], dir: Direction, skip: usize) -> T {
    let mut m = T::one();
    for i in 0..u.len() {
        if !(dir == Direction::In && i == skip) {
            m *= u[i].powi(d.in_by_class[i] as i32);
        }
        if !(dir == Direction::Out && i == skip) {
            m *= v[i].powi(d.out_by_class[i] as i32);
        }
    }
    m
}
