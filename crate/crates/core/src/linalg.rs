//! Banded solvers used by every implicit march in the crate.
//!
//! Two flavours: a scalar Thomas sweep, generic over `f64` and
//! `Complex64`, and a block Thomas sweep for 2x2 complex blocks (the
//! coupled velocity/magnetic tangential systems).

use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};

/// Solve `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place.
///
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal<T>(lower: &[T], diag: &[T], upper: &[T], rhs: &mut [T]) -> Result<()>
where
    T: Copy + Zero + PartialEq + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = rhs.len();
    if diag.len() != n || lower.len() != n || upper.len() != n {
        return Err(Error::Dimension(format!(
            "tridiagonal bands ({}, {}, {}) vs rhs {}",
            lower.len(),
            diag.len(),
            upper.len(),
            n
        )));
    }
    if n == 0 {
        return Ok(());
    }
    let mut c = vec![T::zero(); n];
    let mut piv = diag[0];
    if piv == T::zero() {
        return Err(Error::Solver("zero pivot in row 0".into()));
    }
    c[0] = upper[0] / piv;
    rhs[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == T::zero() {
            return Err(Error::Solver(format!("zero pivot in row {i}")));
        }
        c[i] = upper[i] / piv;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] = rhs[i] - c[i] * next;
    }
    Ok(())
}

pub type Block = [[Complex64; 2]; 2];
pub type Pair = [Complex64; 2];

pub const ZERO_BLOCK: Block = [[Complex64::new(0.0, 0.0); 2]; 2];

#[inline]
pub fn block_mul(a: &Block, b: &Block) -> Block {
    let mut out = ZERO_BLOCK;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[inline]
pub fn block_apply(a: &Block, v: &Pair) -> Pair {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

#[inline]
fn block_sub(a: &Block, b: &Block) -> Block {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

#[inline]
fn block_inverse(a: &Block) -> Option<Block> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = det.inv();
    Some([
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ])
}

/// Block tridiagonal system with 2x2 complex blocks.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub lower: Vec<Block>,
    pub diag: Vec<Block>,
    pub upper: Vec<Block>,
}

impl BlockTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![ZERO_BLOCK; n],
            diag: vec![ZERO_BLOCK; n],
            upper: vec![ZERO_BLOCK; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Block Thomas sweep; `rhs` is overwritten with the solution.
    pub fn solve(&self, rhs: &mut [Pair]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Dimension(format!("block rhs {} vs system {}", rhs.len(), n)));
        }
        if n == 0 {
            return Ok(());
        }
        let mut c = vec![ZERO_BLOCK; n];
        let inv = block_inverse(&self.diag[0])
            .ok_or_else(|| Error::Solver("singular pivot block in row 0".into()))?;
        c[0] = block_mul(&inv, &self.upper[0]);
        rhs[0] = block_apply(&inv, &rhs[0]);
        for i in 1..n {
            let m = block_sub(&self.diag[i], &block_mul(&self.lower[i], &c[i - 1]));
            let inv = block_inverse(&m)
                .ok_or_else(|| Error::Solver(format!("singular pivot block in row {i}")))?;
            c[i] = block_mul(&inv, &self.upper[i]);
            let lx = block_apply(&self.lower[i], &rhs[i - 1]);
            let r = [rhs[i][0] - lx[0], rhs[i][1] - lx[1]];
            rhs[i] = block_apply(&inv, &r);
        }
        for i in (0..n - 1).rev() {
            let cx = block_apply(&c[i], &rhs[i + 1]);
            rhs[i] = [rhs[i][0] - cx[0], rhs[i][1] - cx[1]];
        }
        Ok(())
    }

    /// `y = A x`, used by tests and residual audits.
    pub fn apply(&self, x: &[Pair]) -> Vec<Pair> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = block_apply(&self.diag[i], &x[i]);
                if i > 0 {
                    let l = block_apply(&self.lower[i], &x[i - 1]);
                    acc = [acc[0] + l[0], acc[1] + l[1]];
                }
                if i + 1 < n {
                    let u = block_apply(&self.upper[i], &x[i + 1]);
                    acc = [acc[0] + u[0], acc[1] + u[1]];
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_thomas_matches_dense_product() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect();
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_block_solve_roundtrip() {
        let n = 9;
        let mut sys = BlockTridiagonal::zeros(n);
        for i in 0..n {
            let s = i as f64;
            sys.diag[i] = [
                [Complex64::new(5.0 + s, 0.3), Complex64::new(0.0, 0.7)],
                [Complex64::new(0.0, 0.7), Complex64::new(4.0, -0.2 * s)],
            ];
            sys.lower[i] = [
                [Complex64::new(-1.0, 0.1), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.2, 0.0), Complex64::new(-1.0, 0.0)],
            ];
            sys.upper[i] = [
                [Complex64::new(-1.2, 0.0), Complex64::new(0.0, -0.1)],
                [Complex64::new(0.0, 0.0), Complex64::new(-0.9, 0.05)],
            ];
        }
        let x: Vec<Pair> = (0..n)
            .map(|i| {
                let s = i as f64;
                [Complex64::new(s.cos(), s.sin()), Complex64::new(0.5 * s, -1.0)]
            })
            .collect();
        let mut rhs = sys.apply(&x);
        sys.solve(&mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a[0] - b[0]).norm() < 1e-12 && (a[1] - b[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        let mut rhs = vec![1.0, 1.0];
        let err = solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &mut rhs).unwrap_err();
        assert!(matches!(err, Error::Solver(_)));
    }
}
