use num_complex::Complex64;

use super::grid::BlGrid;

/// Relative size of the last node value above which a profile is reported
/// as not decayed inside the truncated half-line.
pub const DECAY_THRESHOLD: f64 = 1e-8;

/// Shape-preserving piecewise cubic Hermite interpolant on a uniform grid.
#[derive(Debug, Clone)]
pub struct Pchip {
    values: Vec<f64>,
    slopes: Vec<f64>,
    h: f64,
}

impl Pchip {
    pub fn new(values: &[f64], h: f64) -> Self {
        let n = values.len();
        let mut slopes = vec![0.0; n];
        if n >= 2 {
            let delta: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
            if n == 2 {
                slopes = vec![delta[0]; 2];
            } else {
                for k in 1..n - 1 {
                    let (a, b) = (delta[k - 1], delta[k]);
                    slopes[k] = if a * b <= 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
                }
                slopes[0] = end_slope(delta[0], delta[1]);
                slopes[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
            }
        }
        Self { values: values.to_vec(), slopes, h }
    }

    pub fn z_max(&self) -> f64 {
        self.h * (self.values.len() - 1) as f64
    }

    /// Value at `z ≥ 0`; exactly zero beyond the last node.
    pub fn eval(&self, z: f64) -> f64 {
        let n = self.values.len();
        if n == 0 || z > self.z_max() || z < 0.0 {
            return 0.0;
        }
        let pos = z / self.h;
        let i = (pos.floor() as usize).min(n.saturating_sub(2));
        if n == 1 {
            return self.values[0];
        }
        let t = pos - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * self.h * self.slopes[i] + h01 * self.values[i + 1] + h11 * self.h * self.slopes[i + 1]
    }
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let d = 0.5 * (3.0 * d0 - d1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// True when the last node exceeds the decay threshold relative to the profile maximum.
pub fn decay_violated(values: &[f64]) -> bool {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    match values.last() {
        Some(last) => max > 0.0 && last.abs() > DECAY_THRESHOLD * max,
        None => false,
    }
}

/// Complex variant of [`decay_violated`].
pub fn decay_violated_complex(values: &[Complex64]) -> bool {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    match values.last() {
        Some(last) => max > 0.0 && last.norm() > DECAY_THRESHOLD * max,
        None => false,
    }
}

/// Evaluate a half-line profile at the query points.
///
/// Returns the values together with the decay-truncation warning flag.
pub fn interp_halfline(values: &[f64], grid: &BlGrid, queries: &[f64]) -> (Vec<f64>, bool) {
    let p = Pchip::new(values, grid.spacing());
    (queries.iter().map(|&z| p.eval(z)).collect(), decay_violated(values))
}

/// Complex profile interpolation, real and imaginary parts independently.
#[derive(Debug, Clone)]
pub struct ComplexPchip {
    re: Pchip,
    im: Pchip,
}

impl ComplexPchip {
    pub fn new(values: &[Complex64], h: f64) -> Self {
        let re: Vec<f64> = values.iter().map(|c| c.re).collect();
        let im: Vec<f64> = values.iter().map(|c| c.im).collect();
        Self { re: Pchip::new(&re, h), im: Pchip::new(&im, h) }
    }

    pub fn eval(&self, z: f64) -> Complex64 {
        Complex64::new(self.re.eval(z), self.im.eval(z))
    }
}
