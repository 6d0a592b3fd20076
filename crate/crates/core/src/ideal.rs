//! Exact outer (inviscid) solution of the plane-parallel system.
//!
//! `u1` is the time integral of the forcing, `H1` is frozen, and the
//! tangential pair is diagonalized by `w± = u2 ± H2`, each mode transported
//! with speed `u1 ∓ H1` and solved by an integrating factor.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{ddz_slice, to_modal, ChannelGrid, ModalField, PhysicalField, Profile1D, Wall};
use crate::quadrature::integrate;
use crate::scenario::Scenario;

const QUAD_TOL: f64 = 1e-12;

/// Outer state at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterSnapshot {
    pub u1: Profile1D,
    pub h1: Profile1D,
    pub u2: ModalField,
    pub h2: ModalField,
}

/// Outer values and z-slopes at a wall at one instant; modal entries indexed by `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WallTrace {
    pub t: f64,
    pub u1: f64,
    pub h1: f64,
    pub dz_u1: f64,
    pub dz_h1: f64,
    pub u2: Vec<Complex64>,
    pub h2: Vec<Complex64>,
    pub dz_u2: Vec<Complex64>,
    pub dz_h2: Vec<Complex64>,
}

/// Stored outer time series with wall traces at every snapshot.
#[derive(Debug, Clone)]
pub struct OuterSolution {
    pub times: Vec<f64>,
    pub u1: Vec<Profile1D>,
    pub h1: Profile1D,
    pub u2: Vec<ModalField>,
    pub h2: Vec<ModalField>,
    /// `traces[wall.index()][snapshot]`.
    pub traces: [Vec<WallTrace>; 2],
}

impl OuterSolution {
    pub fn snapshot(&self, i: usize) -> OuterSnapshot {
        OuterSnapshot {
            u1: self.u1[i].clone(),
            h1: Profile1D::new(self.h1.values.clone(), self.times[i]),
            u2: self.u2[i].clone(),
            h2: self.h2[i].clone(),
        }
    }
}

/// `(w⁺, w⁻) = (u2 + H2, u2 − H2)`.
pub fn elsasser_split(u2: &ModalField, h2: &ModalField) -> Result<(ModalField, ModalField)> {
    Ok((u2.axpby(1.0, h2, 1.0)?, u2.axpby(1.0, h2, -1.0)?))
}

/// `(u2, H2) = ((w⁺ + w⁻)/2, (w⁺ − w⁻)/2)`.
pub fn elsasser_merge(wp: &ModalField, wm: &ModalField) -> Result<(ModalField, ModalField)> {
    Ok((wp.axpby(0.5, wm, 0.5)?, wp.axpby(0.5, wm, -0.5)?))
}

/// `u1⁰(t, z) = a(z) + ∫₀ᵗ f1(s, z) ds`.
pub fn u1_outer_value(s: &Scenario, t: f64, z: f64) -> Result<f64> {
    let f1 = &s.f1;
    let v = (s.a)(z) + integrate(|r| f1(r, z), 0.0, t, QUAD_TOL)?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("outer u1 at t={t}, z={z}")));
    }
    Ok(v)
}

/// `∫₀ᵗ u1⁰(s, z) ds = a(z) t + ∫₀ᵗ (t − s) f1(s, z) ds`.
pub fn u1_outer_integral(s: &Scenario, t: f64, z: f64) -> Result<f64> {
    let f1 = &s.f1;
    Ok((s.a)(z) * t + integrate(|r| (t - r) * f1(r, z), 0.0, t, QUAD_TOL)?)
}

/// Outer `u1` series on the grid.
pub fn solve_u1_outer(s: &Scenario, grid: &ChannelGrid, times: &[f64]) -> Result<Vec<Profile1D>> {
    times
        .iter()
        .map(|&t| {
            let values = grid.z().par_iter().map(|&z| u1_outer_value(s, t, z)).collect::<Result<Vec<_>>>()?;
            Ok(Profile1D::new(values, t))
        })
        .collect()
}

/// Outer `H1`: the initial profile, constant in time.
pub fn h1_outer(s: &Scenario, grid: &ChannelGrid) -> Profile1D {
    Profile1D::sample(grid, 0.0, |z| (s.c)(z))
}

/// The first-order outer increment, identically zero.
pub fn first_order_outer(grid: &ChannelGrid) -> OuterSnapshot {
    OuterSnapshot {
        u1: Profile1D::zeros(grid.nz()),
        h1: Profile1D::zeros(grid.nz()),
        u2: ModalField::zeros_like(grid),
        h2: ModalField::zeros_like(grid),
    }
}

/// Evaluator of the outer solution at arbitrary times.
pub struct IdealOuter<'a> {
    scenario: &'a Scenario,
    grid: &'a ChannelGrid,
    h1: Profile1D,
    wp0: ModalField,
    wm0: ModalField,
}

impl<'a> IdealOuter<'a> {
    pub fn new(scenario: &'a Scenario, grid: &'a ChannelGrid) -> Result<Self> {
        if (scenario.length - grid.length()).abs() > 1e-12 * scenario.length {
            return Err(Error::Dimension(format!(
                "scenario period {} differs from grid period {}",
                scenario.length,
                grid.length()
            )));
        }
        let b = to_modal(&PhysicalField::sample(grid, |x, z| (scenario.b)(x, z)), grid)?;
        let d = to_modal(&PhysicalField::sample(grid, |x, z| (scenario.d)(x, z)), grid)?;
        if !(b.is_finite() && d.is_finite()) {
            return Err(Error::NonFinite("initial tangential data".into()));
        }
        let (wp0, wm0) = elsasser_split(&b, &d)?;
        Ok(Self { scenario, grid, h1: h1_outer(scenario, grid), wp0, wm0 })
    }

    pub fn grid(&self) -> &ChannelGrid {
        self.grid
    }

    pub fn h1(&self) -> &Profile1D {
        &self.h1
    }

    /// Modes of `(w⁺, w⁻)` at node `j` and time `t`.
    fn elsasser_node(&self, t: f64, j: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let z = self.grid.z()[j];
        let int_u1 = u1_outer_integral(self.scenario, t, z)?;
        let c = self.h1.values[j];
        let nm = self.grid.nmodes();
        let mut wp = Vec::with_capacity(nm);
        let mut wm = Vec::with_capacity(nm);
        for k in 0..nm {
            let kk = self.grid.derivative_wavenumber(k);
            let phase_p = Complex64::from_polar(1.0, -kk * (int_u1 - c * t));
            let phase_m = Complex64::from_polar(1.0, -kk * (int_u1 + c * t));
            let (mut p, mut m) = (self.wp0.get(k, j) * phase_p, self.wm0.get(k, j) * phase_m);
            if self.scenario.has_f2() {
                p += self.duhamel(t, j, k, -c)?;
                m += self.duhamel(t, j, k, c)?;
            }
            wp.push(p);
            wm.push(m);
        }
        Ok((wp, wm))
    }

    /// `∫₀ᵗ exp(−i k̃ (Φ(t) − Φ(s))) f̂2(s, k, z_j) ds` with `Φ(s) = ∫₀ˢ u1⁰ + h s`.
    fn duhamel(&self, t: f64, j: usize, k: usize, h: f64) -> Result<Complex64> {
        let z = self.grid.z()[j];
        let kk = self.grid.derivative_wavenumber(k);
        let phi_t = u1_outer_integral(self.scenario, t, z)? + h * t;
        let f_hat = |s: f64| -> Complex64 {
            let nx = self.grid.nx();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x) in self.grid.x_nodes().into_iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * i) as f64 / nx as f64;
                acc += Complex64::from_polar(self.scenario.f2_at(s, x, z), ang);
            }
            acc / nx as f64
        };
        let integrand = |s: f64| -> Complex64 {
            let phi_s = u1_outer_integral(self.scenario, s, z).unwrap_or(f64::NAN) + h * s;
            f_hat(s) * Complex64::from_polar(1.0, -kk * (phi_t - phi_s))
        };
        let re = integrate(|s| integrand(s).re, 0.0, t, QUAD_TOL)?;
        let im = integrate(|s| integrand(s).im, 0.0, t, QUAD_TOL)?;
        let v = Complex64::new(re, im);
        Ok(if k == 0 || k == self.grid.nx() / 2 { Complex64::new(v.re, 0.0) } else { v })
    }

    /// Elsässer fields at time `t`.
    pub fn elsasser_at(&self, t: f64) -> Result<(ModalField, ModalField)> {
        let cols = (0..self.grid.nz())
            .into_par_iter()
            .map(|j| self.elsasser_node(t, j))
            .collect::<Result<Vec<_>>>()?;
        let mut wp = ModalField::zeros_like(self.grid).with_time(t);
        let mut wm = ModalField::zeros_like(self.grid).with_time(t);
        for (j, (p, m)) in cols.into_iter().enumerate() {
            for k in 0..self.grid.nmodes() {
                wp.set(k, j, p[k]);
                wm.set(k, j, m[k]);
            }
        }
        Ok((wp, wm))
    }

    pub fn at(&self, t: f64) -> Result<OuterSnapshot> {
        let (wp, wm) = self.elsasser_at(t)?;
        let (mut u2, mut h2) = elsasser_merge(&wp, &wm)?;
        u2.time = t;
        h2.time = t;
        let u1 = Profile1D::new(
            self.grid.z().par_iter().map(|&z| u1_outer_value(self.scenario, t, z)).collect::<Result<Vec<_>>>()?,
            t,
        );
        Ok(OuterSnapshot { u1, h1: Profile1D::new(self.h1.values.clone(), t), u2, h2 })
    }

    /// Outer values and slopes at a wall, from the three nodes nearest to it.
    pub fn wall_trace(&self, t: f64, wall: Wall) -> Result<WallTrace> {
        let n = self.grid.nz();
        let idx: [usize; 3] = match wall {
            Wall::Lower => [0, 1, 2],
            Wall::Upper => [n - 3, n - 2, n - 1],
        };
        let wall_j = if wall == Wall::Lower { 0 } else { n - 1 };
        let (_, w) = self.grid.d1_stencil(wall_j);
        let z = self.grid.z();
        let mut u1 = [0.0; 3];
        let mut modes = Vec::with_capacity(3);
        for (r, &j) in idx.iter().enumerate() {
            u1[r] = u1_outer_value(self.scenario, t, z[j])?;
            modes.push(self.elsasser_node(t, j)?);
        }
        let h1v: Vec<f64> = idx.iter().map(|&j| self.h1.values[j]).collect();
        let r0 = if wall == Wall::Lower { 0 } else { 2 };
        let nm = self.grid.nmodes();
        let mut tr = WallTrace {
            t,
            u1: u1[r0],
            h1: h1v[r0],
            dz_u1: w[0] * u1[0] + w[1] * u1[1] + w[2] * u1[2],
            dz_h1: w[0] * h1v[0] + w[1] * h1v[1] + w[2] * h1v[2],
            u2: vec![Complex64::new(0.0, 0.0); nm],
            h2: vec![Complex64::new(0.0, 0.0); nm],
            dz_u2: vec![Complex64::new(0.0, 0.0); nm],
            dz_h2: vec![Complex64::new(0.0, 0.0); nm],
        };
        for k in 0..nm {
            let u: Vec<Complex64> = modes.iter().map(|(p, m)| (p[k] + m[k]) * 0.5).collect();
            let h: Vec<Complex64> = modes.iter().map(|(p, m)| (p[k] - m[k]) * 0.5).collect();
            tr.u2[k] = u[r0];
            tr.h2[k] = h[r0];
            tr.dz_u2[k] = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
            tr.dz_h2[k] = h[0] * w[0] + h[1] * w[1] + h[2] * w[2];
        }
        Ok(tr)
    }

    /// Stored series at the requested times.
    pub fn solve(&self, times: &[f64]) -> Result<OuterSolution> {
        let mut sol = OuterSolution {
            times: times.to_vec(),
            u1: Vec::with_capacity(times.len()),
            h1: self.h1.clone(),
            u2: Vec::with_capacity(times.len()),
            h2: Vec::with_capacity(times.len()),
            traces: [Vec::new(), Vec::new()],
        };
        for &t in times {
            let snap = self.at(t)?;
            sol.u1.push(snap.u1);
            sol.u2.push(snap.u2);
            sol.h2.push(snap.h2);
            for wall in Wall::BOTH {
                sol.traces[wall.index()].push(self.wall_trace(t, wall)?);
            }
        }
        Ok(sol)
    }
}

/// Tangential outer series for the given times (convenience wrapper).
pub fn solve_tangential_outer(
    s: &Scenario,
    grid: &ChannelGrid,
    times: &[f64],
) -> Result<(Vec<ModalField>, Vec<ModalField>)> {
    let outer = IdealOuter::new(s, grid)?;
    let mut u2 = Vec::new();
    let mut h2 = Vec::new();
    for &t in times {
        let snap = outer.at(t)?;
        u2.push(snap.u2);
        h2.push(snap.h2);
    }
    Ok((u2, h2))
}

/// z-slope of the outer `H1` profile at both walls.
pub fn h1_wall_slopes(s: &Scenario, grid: &ChannelGrid) -> Result<[f64; 2]> {
    let d = ddz_slice(grid, &h1_outer(s, grid).values)?;
    Ok([d[0], d[grid.nz() - 1]])
}
