use num_complex::Complex64;
use std::ops::{Add, Mul};

use super::grid::ChannelGrid;
use super::modal::{ModalField, Profile1D};
use crate::error::{Error, Result};

/// Fornberg finite-difference weights for derivatives `0..=m` at `x0`
/// from the nodes `xs`; row `d` holds the weights of the `d`-th derivative.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First z-derivative of nodal values: centered three-point inside,
/// one-sided three-point at the walls.
pub fn ddz_slice<T>(grid: &ChannelGrid, f: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    check_len(grid, f.len())?;
    Ok((0..f.len())
        .map(|j| {
            let (s, w) = grid.d1_stencil(j);
            f[s] * w[0] + f[s + 1] * w[1] + f[s + 2] * w[2]
        })
        .collect())
}

/// Second z-derivative: three-point inside, four-point one-sided at the walls.
pub fn d2z_slice<T>(grid: &ChannelGrid, f: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    check_len(grid, f.len())?;
    let n = f.len();
    if n < 4 {
        return Err(Error::Dimension("second derivative needs at least 4 z nodes".into()));
    }
    let z = grid.z();
    let mut out = Vec::with_capacity(n);
    let w0 = &fornberg_weights(z[0], &z[..4], 2)[2];
    out.push(f[0] * w0[0] + f[1] * w0[1] + f[2] * w0[2] + f[3] * w0[3]);
    for j in 1..n - 1 {
        let w = grid.d2_stencil(j);
        out.push(f[j - 1] * w[0] + f[j] * w[1] + f[j + 1] * w[2]);
    }
    let wl = &fornberg_weights(z[n - 1], &z[n - 4..], 2)[2];
    out.push(f[n - 4] * wl[0] + f[n - 3] * wl[1] + f[n - 2] * wl[2] + f[n - 1] * wl[3]);
    Ok(out)
}

fn check_len(grid: &ChannelGrid, n: usize) -> Result<()> {
    if grid.nz() < 3 {
        return Err(Error::Dimension("z-derivative needs at least 3 nodes".into()));
    }
    if n != grid.nz() {
        return Err(Error::Dimension(format!("{n} values on {} z nodes", grid.nz())));
    }
    Ok(())
}

/// z-differentiation for the two field types living on a channel grid.
pub trait ZDerivative: Sized {
    fn ddz(&self, grid: &ChannelGrid) -> Result<Self>;
    fn d2z(&self, grid: &ChannelGrid) -> Result<Self>;
}

impl ZDerivative for Profile1D {
    fn ddz(&self, grid: &ChannelGrid) -> Result<Self> {
        Ok(Profile1D::new(ddz_slice(grid, &self.values)?, self.time))
    }

    fn d2z(&self, grid: &ChannelGrid) -> Result<Self> {
        Ok(Profile1D::new(d2z_slice(grid, &self.values)?, self.time))
    }
}

impl ZDerivative for ModalField {
    fn ddz(&self, grid: &ChannelGrid) -> Result<Self> {
        self.check_grid(grid)?;
        let mut out = ModalField::zeros(self.nx(), self.nz()).with_time(self.time);
        for k in 0..self.nmodes() {
            out.set_mode(k, &ddz_slice::<Complex64>(grid, self.mode(k))?);
        }
        Ok(out)
    }

    fn d2z(&self, grid: &ChannelGrid) -> Result<Self> {
        self.check_grid(grid)?;
        let mut out = ModalField::zeros(self.nx(), self.nz()).with_time(self.time);
        for k in 0..self.nmodes() {
            out.set_mode(k, &d2z_slice::<Complex64>(grid, self.mode(k))?);
        }
        Ok(out)
    }
}

/// One-sided derivative of uniformly spaced samples at index 0 (second order).
pub fn wall_slope_uniform(f0: f64, f1: f64, f2: f64, h: f64) -> f64 {
    (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
}
