//! Dense Gaussian elimination with partial pivoting for the small systems
//! (at most eight classes) the analytics produce.

#![allow(clippy::needless_range_loop)]

use crate::Real;

/// Row-echelon factorisation `P A = L U`, stored in place.
#[derive(Debug, Clone)]
pub(crate) struct Lu<T> {
    lu: Vec<Vec<T>>,
    perm: Vec<usize>,
    det: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &[Vec<T>]) -> Self {
        let n = a.len();
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| lu[r][col].abs().partial_cmp(&lu[s][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap();
            if pivot != col {
                lu.swap(pivot, col);
                perm.swap(pivot, col);
                det = -det;
            }
            let d = lu[col][col];
            det *= d;
            if d == T::zero() {
                continue;
            }
            for r in col + 1..n {
                let factor = lu[r][col] / d;
                lu[r][col] = factor;
                for c in col + 1..n {
                    let delta = factor * lu[col][c];
                    lu[r][c] -= delta;
                }
            }
        }
        Lu { lu, perm, det }
    }

    pub fn det(&self) -> T {
        self.det
    }

    /// Solves `A x = b`. Returns `None` when a pivot is exactly zero.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.lu.len();
        let mut x: Vec<T> = self.perm.iter().map(|&r| b[r]).collect();
        for r in 0..n {
            for c in 0..r {
                let delta = self.lu[r][c] * x[c];
                x[r] -= delta;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let delta = self.lu[r][c] * x[c];
                x[r] -= delta;
            }
            if self.lu[r][r] == T::zero() {
                return None;
            }
            x[r] /= self.lu[r][r];
        }
        Some(x)
    }

    /// Infinity-norm condition number `|A| |A^-1|`, via the explicit inverse.
    pub fn condition(&self, a: &[Vec<T>]) -> T {
        let n = a.len();
        let norm = |rows: &dyn Fn(usize) -> Vec<T>| (0..n).map(|r| rows(r).iter().map(|v| v.abs()).sum::<T>()).fold(T::zero(), T::max);
        let mut inv = vec![vec![T::zero(); n]; n];
        for c in 0..n {
            let mut e = vec![T::zero(); n];
            e[c] = T::one();
            match self.solve(&e) {
                Some(col) => {
                    for r in 0..n {
                        inv[r][c] = col[r];
                    }
                }
                None => return T::infinity(),
            }
        }
        norm(&|r| a[r].clone()) * norm(&|r| inv[r].clone())
    }
}
