use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::ChannelGrid;
use crate::error::{Error, Result};

/// Real samples on the `nx × nz` collocation lattice, stored z-row major:
/// `values[j * nx + i]` is the sample at `(x_i, z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub nx: usize,
    pub nz: usize,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(nx: usize, nz: usize) -> Self {
        Self { nx, nz, values: vec![0.0; nx * nz] }
    }

    /// Sample `f(x, z)` on the grid nodes.
    pub fn sample(grid: &ChannelGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let xs = grid.x_nodes();
        let nx = grid.nx();
        let mut values = Vec::with_capacity(nx * grid.nz());
        for &z in grid.z() {
            values.extend(xs.iter().map(|&x| f(x, z)));
        }
        Self { nx, nz: grid.nz(), values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fourier-in-x coefficients on the z nodes.
///
/// Only `k = 0..=nx/2` is stored; negative modes are the conjugates, so the
/// field is real by construction. Coefficient normalization is
/// `f(x) = Σ_k c_k e^{i k̃ x}` over `k = −nx/2+1 ..= nx/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    nx: usize,
    nz: usize,
    coeffs: Vec<Complex64>,
    pub time: f64,
}

impl ModalField {
    pub fn zeros(nx: usize, nz: usize) -> Self {
        Self { nx, nz, coeffs: vec![Complex64::new(0.0, 0.0); (nx / 2 + 1) * nz], time: 0.0 }
    }

    pub fn zeros_like(grid: &ChannelGrid) -> Self {
        Self::zeros(grid.nx(), grid.nz())
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn nmodes(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.coeffs[k * self.nz + j]
    }

    /// Coefficient of signed mode `k` (negative modes via conjugation).
    pub fn signed(&self, k: i64, j: usize) -> Complex64 {
        if k >= 0 {
            self.get(k as usize, j)
        } else {
            self.get((-k) as usize, j).conj()
        }
    }

    /// Set coefficient `(k, j)`. The mean and Nyquist modes are kept real.
    pub fn set(&mut self, k: usize, j: usize, v: Complex64) {
        let v = if k == 0 || k == self.nx / 2 { Complex64::new(v.re, 0.0) } else { v };
        self.coeffs[k * self.nz + j] = v;
    }

    pub fn mode(&self, k: usize) -> &[Complex64] {
        &self.coeffs[k * self.nz..(k + 1) * self.nz]
    }

    /// Replace a whole mode column; the mean and Nyquist columns are projected to real values.
    pub fn set_mode(&mut self, k: usize, values: &[Complex64]) {
        for (j, &v) in values.iter().enumerate() {
            self.set(k, j, v);
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.nx == other.nx && self.nz == other.nz
    }

    pub fn check_grid(&self, grid: &ChannelGrid) -> Result<()> {
        if self.nx != grid.nx() || self.nz != grid.nz() {
            return Err(Error::Dimension(format!(
                "modal field {}x{} on grid {}x{}",
                self.nx,
                self.nz,
                grid.nx(),
                grid.nz()
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::Dimension("modal fields differ in shape".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x * a + y * b).collect();
        Ok(Self { nx: self.nx, nz: self.nz, coeffs, time: self.time })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            nx: self.nx,
            nz: self.nz,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            time: self.time,
        }
    }

    /// Apply `f(k, j, c)` to every stored coefficient.
    pub fn map(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut out = Self::zeros(self.nx, self.nz).with_time(self.time);
        for k in 0..self.nmodes() {
            for j in 0..self.nz {
                out.set(k, j, f(k, j, self.get(k, j)));
            }
        }
        out
    }

    /// Spectral x-derivative on `grid` (Nyquist derivative set to zero).
    pub fn ddx(&self, grid: &ChannelGrid) -> Self {
        self.map(|k, _, c| c * Complex64::new(0.0, grid.derivative_wavenumber(k)))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Real-space samples of this field.
    pub fn to_physical(&self) -> PhysicalField {
        from_modal(self)
    }

    /// Value at an arbitrary `x` on node row `j`.
    pub fn eval_x(&self, x: f64, j: usize, length: f64) -> f64 {
        let mut acc = self.get(0, j).re;
        let base = 2.0 * std::f64::consts::PI / length;
        for k in 1..self.nmodes() {
            let phase = Complex64::from_polar(1.0, base * k as f64 * x);
            let m = if k == self.nx / 2 { 1.0 } else { 2.0 };
            acc += m * (self.get(k, j) * phase).re;
        }
        acc
    }
}

/// Forward transform of real samples into stored modes.
pub fn to_modal(field: &PhysicalField, grid: &ChannelGrid) -> Result<ModalField> {
    if field.nx != grid.nx() || field.nz != grid.nz() || field.values.len() != field.nx * field.nz {
        return Err(Error::Dimension(format!(
            "physical field {}x{} on grid {}x{}",
            field.nx,
            field.nz,
            grid.nx(),
            grid.nz()
        )));
    }
    let nx = field.nx;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nx);
    let mut out = ModalField::zeros(nx, field.nz);
    let mut buf = vec![Complex64::new(0.0, 0.0); nx];
    let scale = 1.0 / nx as f64;
    for j in 0..field.nz {
        for (b, &v) in buf.iter_mut().zip(&field.values[j * nx..(j + 1) * nx]) {
            *b = Complex64::new(v, 0.0);
        }
        fft.process(&mut buf);
        for k in 0..=nx / 2 {
            out.set(k, j, buf[k] * scale);
        }
    }
    Ok(out)
}

/// Stored modes `k = 0..=nx/2` of one periodic line of real samples.
pub fn line_modes(samples: &[f64]) -> Vec<Complex64> {
    let nx = samples.len();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nx);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let scale = 1.0 / nx as f64;
    let mut out: Vec<Complex64> = buf[..=nx / 2].iter().map(|c| c * scale).collect();
    out[0].im = 0.0;
    out[nx / 2].im = 0.0;
    out
}

/// Inverse transform back to real samples.
pub fn from_modal(field: &ModalField) -> PhysicalField {
    let nx = field.nx;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(nx);
    let mut out = PhysicalField::zeros(nx, field.nz);
    let mut buf = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..field.nz {
        for k in 0..=nx / 2 {
            buf[k] = field.get(k, j);
        }
        for k in 1..nx / 2 {
            buf[nx - k] = field.get(k, j).conj();
        }
        fft.process(&mut buf);
        for (o, b) in out.values[j * nx..(j + 1) * nx].iter_mut().zip(&buf) {
            *o = b.re;
        }
    }
    out
}

/// A real function of `z` alone on the channel nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    pub values: Vec<f64>,
    pub time: f64,
}

impl Profile1D {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        Self { values, time }
    }

    pub fn zeros(nz: usize) -> Self {
        Self { values: vec![0.0; nz], time: 0.0 }
    }

    pub fn sample(grid: &ChannelGrid, t: f64, f: impl Fn(f64) -> f64) -> Self {
        Self { values: grid.z().iter().map(|&z| f(z)).collect(), time: t }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_grid(&self, grid: &ChannelGrid) -> Result<()> {
        if self.values.len() != grid.nz() {
            return Err(Error::Dimension(format!(
                "profile of length {} on grid with {} z nodes",
                self.values.len(),
                grid.nz()
            )));
        }
        Ok(())
    }

    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension("profiles differ in length".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
            time: self.time,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> ChannelGrid {
        ChannelGrid::new(16, 33, 0.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn constant_field_is_pure_mean() {
        let g = grid();
        let m = to_modal(&PhysicalField::sample(&g, |_, _| 3.5), &g).unwrap();
        for j in 0..g.nz() {
            assert!((m.get(0, j) - Complex64::new(3.5, 0.0)).norm() < 1e-14);
            for k in 1..m.nmodes() {
                assert!(m.get(k, j).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sine_has_single_pair_of_modes() {
        let g = ChannelGrid::new(16, 33, 0.0, 3.0).unwrap();
        let m = to_modal(&PhysicalField::sample(&g, |x, _| (2.0 * PI * x / 3.0).sin()), &g).unwrap();
        for j in 0..g.nz() {
            assert!((m.get(1, j) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
            assert!((m.signed(-1, j) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
            for k in [0, 2, 3, 8] {
                assert!(m.get(k, j).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn roundtrip_recovers_samples() {
        let g = grid();
        let f = PhysicalField::sample(&g, |x, z| (3.0 * x).cos() * z + (x - z).sin().exp());
        let back = from_modal(&to_modal(&f, &g).unwrap());
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn eval_x_matches_samples() {
        let g = grid();
        let f = PhysicalField::sample(&g, |x, z| (2.0 * x).sin() + z * x.cos());
        let m = to_modal(&f, &g).unwrap();
        let xs = g.x_nodes();
        for j in [0, 7, 32] {
            for i in 0..g.nx() {
                assert!((m.eval_x(xs[i], j, g.length()) - f.at(i, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = grid();
        let f = PhysicalField::zeros(8, 33);
        assert!(matches!(to_modal(&f, &g), Err(Error::Dimension(_))));
    }
}
