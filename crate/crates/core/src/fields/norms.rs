use serde::{Deserialize, Serialize};

use super::deriv::ZDerivative;
use super::grid::ChannelGrid;
use super::modal::{from_modal, ModalField, Profile1D};
use crate::error::{Error, Result};

/// L², H¹ and L∞ values of a field set. In a time series each entry is the
/// maximum over the stored snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormTriple {
    pub l2: f64,
    pub h1: f64,
    pub linf: f64,
}

impl NormTriple {
    pub const ZERO: NormTriple = NormTriple { l2: 0.0, h1: 0.0, linf: 0.0 };

    /// Componentwise maximum, realizing `L∞(0,T; X)` over snapshots.
    pub fn max(self, other: NormTriple) -> NormTriple {
        NormTriple { l2: self.l2.max(other.l2), h1: self.h1.max(other.h1), linf: self.linf.max(other.linf) }
    }

    pub fn get(&self, norm: NormKind) -> f64 {
        match norm {
            NormKind::L2 => self.l2,
            NormKind::H1 => self.h1,
            NormKind::Linf => self.linf,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.l2.is_finite() && self.h1.is_finite() && self.linf.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L2,
    H1,
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L2, NormKind::H1, NormKind::Linf];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L2 => "l2",
            NormKind::H1 => "h1",
            NormKind::Linf => "linf",
        }
    }
}

/// One component of a field set.
#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Profile(&'a Profile1D),
    Modal(&'a ModalField),
}

/// Squared integrals of one component: `(∫|f|², ∫|∂x f|², ∫|∂z f|²)`.
fn squared_parts(field: FieldRef<'_>, grid: &ChannelGrid) -> Result<(f64, f64, f64)> {
    let w = grid.weights();
    let len = grid.length();
    match field {
        FieldRef::Profile(p) => {
            p.check_grid(grid)?;
            let dz = p.ddz(grid)?;
            let mut f2 = 0.0;
            let mut d2 = 0.0;
            for j in 0..grid.nz() {
                f2 += w[j] * p.values[j] * p.values[j];
                d2 += w[j] * dz.values[j] * dz.values[j];
            }
            Ok((len * f2, 0.0, len * d2))
        }
        FieldRef::Modal(m) => {
            m.check_grid(grid)?;
            let dz = m.ddz(grid)?;
            let (mut f2, mut x2, mut z2) = (0.0, 0.0, 0.0);
            for k in 0..m.nmodes() {
                let mult = grid.mode_multiplicity(k);
                let kk = grid.derivative_wavenumber(k);
                let (mut a, mut b) = (0.0, 0.0);
                for j in 0..grid.nz() {
                    a += w[j] * m.get(k, j).norm_sqr();
                    b += w[j] * dz.get(k, j).norm_sqr();
                }
                f2 += mult * a;
                x2 += mult * kk * kk * a;
                z2 += mult * b;
            }
            Ok((len * f2, len * x2, len * z2))
        }
    }
}

/// Norms of a field set on one snapshot.
///
/// L² and H¹ add the squared contributions of every component; L∞ is the
/// maximum over collocation nodes of the pointwise Euclidean magnitude.
pub fn norms(fields: &[FieldRef<'_>], grid: &ChannelGrid) -> Result<NormTriple> {
    let (mut l2sq, mut h1sq) = (0.0, 0.0);
    let nx = grid.nx();
    let mut pointwise = vec![0.0; nx * grid.nz()];
    for &f in fields {
        let (a, b, c) = squared_parts(f, grid)?;
        l2sq += a;
        h1sq += a + b + c;
        match f {
            FieldRef::Profile(p) => {
                for j in 0..grid.nz() {
                    let v2 = p.values[j] * p.values[j];
                    for s in &mut pointwise[j * nx..(j + 1) * nx] {
                        *s += v2;
                    }
                }
            }
            FieldRef::Modal(m) => {
                let phys = from_modal(m);
                for (s, v) in pointwise.iter_mut().zip(&phys.values) {
                    *s += v * v;
                }
            }
        }
    }
    let linf = pointwise.iter().fold(0.0_f64, |a, &b| a.max(b)).sqrt();
    let out = NormTriple { l2: l2sq.sqrt(), h1: h1sq.sqrt(), linf };
    if !out.is_finite() {
        return Err(Error::NonFinite("norm evaluation".into()));
    }
    Ok(out)
}

/// L² norm by brute-force physical quadrature (trapezoid in z, rectangle in x).
pub fn l2_physical(field: &ModalField, grid: &ChannelGrid) -> Result<f64> {
    field.check_grid(grid)?;
    let phys = from_modal(field);
    let dx = grid.length() / grid.nx() as f64;
    let w = grid.weights();
    let mut acc = 0.0;
    for j in 0..grid.nz() {
        let row: f64 = phys.values[j * grid.nx()..(j + 1) * grid.nx()].iter().map(|v| v * v).sum();
        acc += w[j] * row * dx;
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::modal::{to_modal, PhysicalField};
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norms() {
        let g = ChannelGrid::new(16, 33, 0.0, 2.0 * PI).unwrap();
        let m = to_modal(&PhysicalField::sample(&g, |_, _| -2.0), &g).unwrap();
        let n = norms(&[FieldRef::Modal(&m)], &g).unwrap();
        assert!((n.l2 - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((n.linf - 2.0).abs() < 1e-12);
        assert!((n.h1 - n.l2).abs() < 1e-12);
        let p = Profile1D::sample(&g, 0.0, |_| -2.0);
        let np = norms(&[FieldRef::Profile(&p)], &g).unwrap();
        assert!((np.l2 - n.l2).abs() < 1e-12);
    }

    #[test]
    fn separable_sine_l2() {
        let g = ChannelGrid::new(16, 4097, 0.0, 2.0 * PI).unwrap();
        let m = to_modal(&PhysicalField::sample(&g, |x, z| x.sin() * (PI * z).sin()), &g).unwrap();
        let n = norms(&[FieldRef::Modal(&m)], &g).unwrap();
        assert!((n.l2 - (PI / 2.0).sqrt()).abs() < 1e-6);
        assert!((l2_physical(&m, &g).unwrap() - n.l2).abs() < 1e-12);
        // ‖∂x f‖² = π/2, ‖∂z f‖² = π³/2.
        let h1 = (PI / 2.0 + PI / 2.0 + PI.powi(3) / 2.0).sqrt();
        assert!((n.h1 - h1).abs() < 1e-5);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = ChannelGrid::new(8, 33, 0.5, 1.0).unwrap();
        let m = ModalField::zeros_like(&g);
        let p = Profile1D::zeros(33);
        let n = norms(&[FieldRef::Modal(&m), FieldRef::Profile(&p)], &g).unwrap();
        assert_eq!(n, NormTriple::ZERO);
    }

    #[test]
    fn combined_linf_is_pointwise_magnitude() {
        let g = ChannelGrid::new(8, 33, 0.0, 2.0 * PI).unwrap();
        let p = Profile1D::sample(&g, 0.0, |_| 3.0);
        let m = to_modal(&PhysicalField::sample(&g, |_, _| 4.0), &g).unwrap();
        let n = norms(&[FieldRef::Profile(&p), FieldRef::Modal(&m)], &g).unwrap();
        assert!((n.linf - 5.0).abs() < 1e-12);
    }
}
