//! Cut-off functions, the conducting-wall corrector η, the composite
//! approximants and their residuals.
//!
//! Wall-layer terms are interpolated from the half-line grid onto the
//! channel nodes together with their first and second derivatives in the
//! stretched variable; `∂zz` of an assembled field then follows from the
//! chain rule instead of differencing an interpolant.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    d2z_slice, ddz_slice, norms, to_modal, BlGrid, ChannelGrid, ComplexPchip, FieldRef, ModalField, Pchip,
    PhysicalField, Profile1D, Wall, ZDerivative,
};
use crate::ideal::{IdealOuter, OuterSnapshot};
use crate::prandtl::{BlModal, CorrectorSet};
use crate::scenario::{BcMode, Scenario};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quintic drop from 1 at `τ = 0` to 0 at `τ = 1`, with its first two derivatives.
fn smooth_drop(tau: f64) -> [f64; 3] {
    if tau <= 0.0 {
        return [1.0, 0.0, 0.0];
    }
    if tau >= 1.0 {
        return [0.0, 0.0, 0.0];
    }
    let t2 = tau * tau;
    let p = t2 * tau * (10.0 - 15.0 * tau + 6.0 * t2);
    let dp = 30.0 * t2 * (1.0 - 2.0 * tau + t2);
    let ddp = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2);
    [1.0 - p, -dp, -ddp]
}

/// Channel cut-off: 1 on `[0, 1/3]`, 0 on `[1/2, 1]`. Returns `[ψ, ψ', ψ'']`.
pub fn psi(z: f64) -> Result<[f64; 3]> {
    if !(-1e-12..=1.0 + 1e-12).contains(&z) {
        return Err(Error::Precondition(format!("cut-off evaluated at z={z} outside [0,1]")));
    }
    Ok(psi_unchecked(z))
}

fn psi_unchecked(z: f64) -> [f64; 3] {
    if z >= 0.5 {
        return [0.0; 3];
    }
    if z <= 1.0 / 3.0 {
        return [1.0, 0.0, 0.0];
    }
    let s = smooth_drop((z - 1.0 / 3.0) * 6.0);
    [s[0], 6.0 * s[1], 36.0 * s[2]]
}

/// Half-line cut-off: 1 on `[0, 1]`, 0 on `[2, ∞)`. Returns `[ρ, ρ', ρ'']`.
pub fn rho(zz: f64) -> Result<[f64; 3]> {
    if !(zz >= 0.0) {
        return Err(Error::Precondition(format!("half-line cut-off evaluated at Z={zz}")));
    }
    Ok(smooth_drop(zz - 1.0))
}

/// `Zρ(Z)` and its first two derivatives; the η profile per unit amplitude.
pub fn eta_shape(zz: f64) -> [f64; 3] {
    let r = smooth_drop(zz - 1.0);
    [zz * r[0], r[0] + zz * r[1], 2.0 * r[1] + zz * r[2]]
}

/// Amplitudes of η at one wall and time: `(axial, per-mode tangential)`.
///
/// The lower corrector carries `−∂zH⁰(0)`, the upper one `+∂zH⁰(1)` so that
/// both cancel the outer wall slope in `z`.
pub fn eta_amplitudes(dz_h1: f64, dz_h2: &[Complex64], wall: Wall) -> (f64, Vec<Complex64>) {
    let s = match wall {
        Wall::Lower => -1.0,
        Wall::Upper => 1.0,
    };
    (s * dz_h1, dz_h2.iter().map(|c| c * s).collect())
}

/// η on the half-line grid for one wall and stored step.
pub fn eta_corrector(corr: &CorrectorSet, wall: Wall, step: usize) -> Result<(Vec<f64>, BlModal)> {
    let wc = corr.wall(wall);
    let tr = wc
        .traces
        .get(step)
        .ok_or_else(|| Error::Missing(format!("no outer trace at step {step}")))?;
    let (a1, a2) = eta_amplitudes(tr.dz_h1, &tr.dz_h2, wall);
    let bl = &corr.bl;
    let e1: Vec<f64> = bl.nodes().iter().map(|&z| a1 * eta_shape(z)[0]).collect();
    let mut e2 = BlModal::zeros(a2.len(), bl.len());
    for (k, a) in a2.iter().enumerate() {
        for (i, &z) in bl.nodes().iter().enumerate() {
            e2.mode_mut(k)[i] = a * eta_shape(z)[0];
        }
    }
    Ok((e1, e2))
}

/// Which optional pieces enter an assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssemblyTerms {
    pub eta: bool,
    pub order1: bool,
}

impl AssemblyTerms {
    /// Terms of the approximant for a given wall mode and order.
    pub fn full(bc_mode: BcMode, order: u8) -> Self {
        Self { eta: bc_mode == BcMode::Conducting, order1: order >= 1 }
    }

    /// Outer solution plus leading correctors only.
    pub const COMPOSITE: Self = Self { eta: false, order1: false };
}

/// Second z-derivatives of an assembled snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotDzz {
    pub u1: Profile1D,
    pub h1: Profile1D,
    pub u2: ModalField,
    pub h2: ModalField,
}

/// One time level of an approximant on the channel grid.
#[derive(Debug, Clone)]
pub struct ApproxSnapshot {
    pub step: usize,
    pub time: f64,
    pub u1: Profile1D,
    pub h1: Profile1D,
    pub u2: ModalField,
    pub h2: ModalField,
    pub dzz: Option<SnapshotDzz>,
}

/// A composite approximant stored at a set of lattice steps.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub epsilon: f64,
    pub bc_mode: BcMode,
    pub order: u8,
    pub terms: AssemblyTerms,
    pub dt: f64,
    /// Steps at which residuals and errors are evaluated.
    pub snapshot_steps: Vec<usize>,
    /// All stored levels, ordered by step (snapshots and their neighbours).
    pub levels: Vec<ApproxSnapshot>,
}

impl ApproxSolution {
    pub fn level(&self, step: usize) -> Option<&ApproxSnapshot> {
        self.levels.binary_search_by_key(&step, |l| l.step).ok().map(|i| &self.levels[i])
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &ApproxSnapshot> {
        self.snapshot_steps.iter().filter_map(|&s| self.level(s))
    }
}

/// Value and first two stretched-variable derivatives of a layer term on channel nodes.
#[derive(Debug, Clone)]
struct Triple<T> {
    v: T,
    z: T,
    zz: T,
}

type RealTriple = Triple<Vec<f64>>;
type ModalTriple = Triple<ModalField>;

/// Centered second-order derivatives on the uniform half-line grid.
fn bl_derivs<T>(v: &[T], h: f64) -> (Vec<T>, Vec<T>)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            d1.push((v[1] * 4.0 - v[0] * 3.0 - v[2]) * (0.5 / h));
            d2.push((v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) * (1.0 / (h * h)));
        } else if i == n - 1 {
            d1.push((v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * (0.5 / h));
            d2.push((v[n - 1] * 2.0 - v[n - 2] * 5.0 + v[n - 3] * 4.0 - v[n - 4]) * (1.0 / (h * h)));
        } else {
            d1.push((v[i + 1] - v[i - 1]) * (0.5 / h));
            d2.push((v[i + 1] - v[i] * 2.0 + v[i - 1]) * (1.0 / (h * h)));
        }
    }
    (d1, d2)
}

/// Wall-layer geometry on the channel nodes.
#[derive(Debug, Clone)]
struct LayerGeometry {
    /// Stretched coordinate, `None` where the cut-off and its derivatives vanish.
    zeta: Vec<Option<f64>>,
    cut: Vec<[f64; 3]>,
}

impl LayerGeometry {
    fn new(grid: &ChannelGrid, eps: f64, wall: Wall) -> Self {
        let sq = eps.sqrt();
        let mut zeta = Vec::with_capacity(grid.nz());
        let mut cut = Vec::with_capacity(grid.nz());
        for &z in grid.z() {
            let dist = match wall {
                Wall::Lower => z,
                Wall::Upper => 1.0 - z,
            }
            .max(0.0);
            let c = psi_unchecked(dist);
            cut.push(c);
            zeta.push(if dist < 0.5 { Some(dist / sq) } else { None });
        }
        Self { zeta, cut }
    }

    fn real(&self, values: &[f64], bl: &BlGrid) -> RealTriple {
        let h = bl.spacing();
        let (d1, d2) = bl_derivs(values, h);
        let p = [Pchip::new(values, h), Pchip::new(&d1, h), Pchip::new(&d2, h)];
        let ev = |q: &Pchip| self.zeta.iter().map(|z| z.map_or(0.0, |z| q.eval(z))).collect::<Vec<f64>>();
        Triple { v: ev(&p[0]), z: ev(&p[1]), zz: ev(&p[2]) }
    }

    fn modal(&self, m: &BlModal, bl: &BlGrid, grid: &ChannelGrid) -> ModalTriple {
        let h = bl.spacing();
        let mut out = Triple {
            v: ModalField::zeros_like(grid),
            z: ModalField::zeros_like(grid),
            zz: ModalField::zeros_like(grid),
        };
        for k in 0..m.nmodes {
            let vals = m.mode(k);
            if vals.iter().all(|c| *c == ZERO) {
                continue;
            }
            let (d1, d2) = bl_derivs(vals, h);
            let p = [ComplexPchip::new(vals, h), ComplexPchip::new(&d1, h), ComplexPchip::new(&d2, h)];
            for (j, z) in self.zeta.iter().enumerate() {
                if let Some(z) = *z {
                    out.v.set(k, j, p[0].eval(z));
                    out.z.set(k, j, p[1].eval(z));
                    out.zz.set(k, j, p[2].eval(z));
                }
            }
        }
        out
    }

    fn eta_real(&self, a: f64) -> RealTriple {
        let ev = |d: usize| self.zeta.iter().map(|z| z.map_or(0.0, |z| a * eta_shape(z)[d])).collect::<Vec<f64>>();
        Triple { v: ev(0), z: ev(1), zz: ev(2) }
    }

    fn eta_modal(&self, a: &[Complex64], grid: &ChannelGrid) -> ModalTriple {
        let mut out = Triple {
            v: ModalField::zeros_like(grid),
            z: ModalField::zeros_like(grid),
            zz: ModalField::zeros_like(grid),
        };
        for (j, z) in self.zeta.iter().enumerate() {
            if let Some(z) = *z {
                let s = eta_shape(z);
                for (k, ak) in a.iter().enumerate() {
                    out.v.set(k, j, ak * s[0]);
                    out.z.set(k, j, ak * s[1]);
                    out.zz.set(k, j, ak * s[2]);
                }
            }
        }
        out
    }
}

/// Every wall-layer piece at one wall and step, on the channel nodes.
#[derive(Debug, Clone)]
struct LayerParts {
    geo: LayerGeometry,
    theta1: RealTriple,
    h1: RealTriple,
    eta1: RealTriple,
    theta2: ModalTriple,
    h2: ModalTriple,
    eta2: ModalTriple,
    theta2_1: ModalTriple,
    h2_1: ModalTriple,
    /// Time derivative of the tangential η amplitude.
    eta2_rate: Vec<Complex64>,
}

/// Outer values and wall derivatives used by the remainder formulas.
#[derive(Debug, Clone)]
struct OuterParts {
    snap: OuterSnapshot,
    u1_zz: Vec<f64>,
    h1_zz: Vec<f64>,
    u2_lap: ModalField,
    h2_lap: ModalField,
    /// Per wall: `(∂z u1, ∂zz u1, ∂z H1, ∂zz H1)` and per-mode `(∂z u2, ∂zz u2, ∂z H2, ∂zz H2)`.
    wall_axial: [[f64; 4]; 2],
    wall_modal: [[Vec<Complex64>; 4]; 2],
}

/// Builds approximants from an outer solution and a corrector set.
pub struct Composer<'a> {
    outer: &'a IdealOuter<'a>,
    corr: &'a CorrectorSet,
    grid: &'a ChannelGrid,
    eps: f64,
}

impl<'a> Composer<'a> {
    pub fn new(outer: &'a IdealOuter<'a>, corr: &'a CorrectorSet) -> Result<Self> {
        let grid = outer.grid();
        if corr.nmodes != grid.nmodes() {
            return Err(Error::Dimension(format!(
                "correctors carry {} modes, channel grid {}",
                corr.nmodes,
                grid.nmodes()
            )));
        }
        if !(corr.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive (got {})", corr.epsilon)));
        }
        Ok(Self { outer, corr, grid, eps: corr.epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn correctors(&self) -> &CorrectorSet {
        self.corr
    }

    fn record(&self, step: usize) -> Result<usize> {
        self.corr
            .record_index(step)
            .ok_or_else(|| Error::Missing(format!("correctors were not stored at step {step}")))
    }

    fn layer(&self, wall: Wall, step: usize) -> Result<LayerParts> {
        let r = self.record(step)?;
        let wc = self.corr.wall(wall);
        let bl = &self.corr.bl;
        let grid = self.grid;
        let geo = LayerGeometry::new(grid, self.eps, wall);
        let tr = &wc.traces[step];
        let conducting = self.corr.bc_mode == BcMode::Conducting;
        let (a1, a2) = if conducting {
            eta_amplitudes(tr.dz_h1, &tr.dz_h2, wall)
        } else {
            (0.0, vec![ZERO; grid.nmodes()])
        };
        let steps = self.corr.lattice.steps;
        let dt = self.corr.lattice.dt;
        let eta2_rate = if conducting {
            let amp = |s: usize| eta_amplitudes(0.0, &wc.traces[s].dz_h2, wall).1;
            let (lo, hi, span) = if step == 0 {
                (0, 1, dt)
            } else if step == steps {
                (steps - 1, steps, dt)
            } else {
                (step - 1, step + 1, 2.0 * dt)
            };
            let (p, q) = (amp(lo), amp(hi));
            p.iter().zip(&q).map(|(a, b)| (b - a) / span).collect()
        } else {
            vec![ZERO; grid.nmodes()]
        };
        let zero_modal = || Triple {
            v: ModalField::zeros_like(grid),
            z: ModalField::zeros_like(grid),
            zz: ModalField::zeros_like(grid),
        };
        let (theta2_1, h2_1) = match (&wc.theta2_1, &wc.h2_1) {
            (Some(t), Some(h)) => (geo.modal(&t[r], bl, grid), geo.modal(&h[r], bl, grid)),
            _ => (zero_modal(), zero_modal()),
        };
        Ok(LayerParts {
            theta1: geo.real(&wc.theta1[step], bl),
            h1: geo.real(&wc.h1[step], bl),
            eta1: geo.eta_real(a1),
            theta2: geo.modal(&wc.theta2[r], bl, grid),
            h2: geo.modal(&wc.h2[r], bl, grid),
            eta2: geo.eta_modal(&a2, grid),
            theta2_1,
            h2_1,
            eta2_rate,
            geo,
        })
    }

    fn outer_parts(&self, t: f64) -> Result<OuterParts> {
        let grid = self.grid;
        let snap = self.outer.at(t)?;
        let u1_zz = d2z_slice(grid, &snap.u1.values)?;
        let h1_zz = d2z_slice(grid, &snap.h1.values)?;
        let lap = |m: &ModalField| -> Result<ModalField> {
            let d = m.d2z(grid)?;
            Ok(d.map(|k, j, c| c - m.get(k, j) * grid.wavenumber(k).powi(2)))
        };
        let u2_lap = lap(&snap.u2)?;
        let h2_lap = lap(&snap.h2)?;
        let du1 = ddz_slice(grid, &snap.u1.values)?;
        let dh1 = ddz_slice(grid, &snap.h1.values)?;
        let du2 = snap.u2.ddz(grid)?;
        let dh2 = snap.h2.ddz(grid)?;
        let ddu2 = snap.u2.d2z(grid)?;
        let ddh2 = snap.h2.d2z(grid)?;
        let mut wall_axial = [[0.0; 4]; 2];
        let mut wall_modal: [[Vec<Complex64>; 4]; 2] = Default::default();
        for w in Wall::BOTH {
            let j = match w {
                Wall::Lower => 0,
                Wall::Upper => grid.nz() - 1,
            };
            wall_axial[w.index()] = [du1[j], u1_zz[j], dh1[j], h1_zz[j]];
            let col = |m: &ModalField| (0..grid.nmodes()).map(|k| m.get(k, j)).collect::<Vec<_>>();
            wall_modal[w.index()] = [col(&du2), col(&ddu2), col(&dh2), col(&ddh2)];
        }
        Ok(OuterParts { snap, u1_zz, h1_zz, u2_lap, h2_lap, wall_axial, wall_modal })
    }

    /// Assemble one stored step.
    pub fn assemble_step(&self, step: usize, terms: AssemblyTerms, with_dzz: bool) -> Result<ApproxSnapshot> {
        let t = self.corr.lattice.time(step);
        let grid = self.grid;
        let op = self.outer_parts(t)?;
        let layers = [self.layer(Wall::Lower, step)?, self.layer(Wall::Upper, step)?];
        let sq = self.eps.sqrt();
        let eps = self.eps;
        let nz = grid.nz();
        let es = if terms.eta { sq } else { 0.0 };
        let os = if terms.order1 { sq } else { 0.0 };

        let mut u1 = op.snap.u1.values.clone();
        let mut h1 = op.snap.h1.values.clone();
        let mut u1zz = op.u1_zz.clone();
        let mut h1zz = op.h1_zz.clone();
        let mut u2 = op.snap.u2.clone();
        let mut h2 = op.snap.h2.clone();
        let mut u2zz = op.snap.u2.d2z(grid)?;
        let mut h2zz = op.snap.h2.d2z(grid)?;
        for lp in &layers {
            for j in 0..nz {
                let [c, c1, c2] = lp.geo.cut[j];
                if c == 0.0 && c1 == 0.0 {
                    continue;
                }
                let comb = |v: f64, d: f64, dd: f64| (c * v, c2 * v + 2.0 * c1 * d / sq + c * dd / eps);
                let (a, b) = comb(lp.theta1.v[j], lp.theta1.z[j], lp.theta1.zz[j]);
                u1[j] += a;
                u1zz[j] += b;
                let (a, b) = comb(
                    lp.h1.v[j] + es * lp.eta1.v[j],
                    lp.h1.z[j] + es * lp.eta1.z[j],
                    lp.h1.zz[j] + es * lp.eta1.zz[j],
                );
                h1[j] += a;
                h1zz[j] += b;
                for k in 0..grid.nmodes() {
                    let pick = |m: &ModalTriple, n: &ModalTriple, s: f64| {
                        [m.v.get(k, j) + n.v.get(k, j) * s, m.z.get(k, j) + n.z.get(k, j) * s, m.zz.get(k, j) + n.zz.get(k, j) * s]
                    };
                    let th = pick(&lp.theta2, &lp.theta2_1, os);
                    let hh0 = pick(&lp.h2, &lp.h2_1, os);
                    let hh = [
                        hh0[0] + lp.eta2.v.get(k, j) * es,
                        hh0[1] + lp.eta2.z.get(k, j) * es,
                        hh0[2] + lp.eta2.zz.get(k, j) * es,
                    ];
                    let cc = |b: [Complex64; 3]| (b[0] * c, b[0] * c2 + b[1] * (2.0 * c1 / sq) + b[2] * (c / eps));
                    let (a, b) = cc(th);
                    u2.set(k, j, u2.get(k, j) + a);
                    u2zz.set(k, j, u2zz.get(k, j) + b);
                    let (a, b) = cc(hh);
                    h2.set(k, j, h2.get(k, j) + a);
                    h2zz.set(k, j, h2zz.get(k, j) + b);
                }
            }
        }
        u2.time = t;
        h2.time = t;
        let dzz = with_dzz.then(|| SnapshotDzz {
            u1: Profile1D::new(u1zz, t),
            h1: Profile1D::new(h1zz, t),
            u2: u2zz.with_time(t),
            h2: h2zz.with_time(t),
        });
        Ok(ApproxSnapshot { step, time: t, u1: Profile1D::new(u1, t), h1: Profile1D::new(h1, t), u2, h2, dzz })
    }

    /// Assemble at every stored corrector step; second derivatives are kept at snapshots.
    pub fn assemble(&self, order: u8, terms: AssemblyTerms) -> Result<ApproxSolution> {
        if order > self.corr.order {
            return Err(Error::Missing(format!(
                "order-{order} approximant requested from order-{} correctors",
                self.corr.order
            )));
        }
        let lat = &self.corr.lattice;
        let levels = self
            .corr
            .record_steps
            .par_iter()
            .map(|&s| self.assemble_step(s, terms, lat.is_snapshot(s)))
            .collect::<Result<Vec<_>>>()?;
        let snapshot_steps = lat.snapshot_steps().into_iter().filter(|s| self.corr.record_index(*s).is_some()).collect();
        Ok(ApproxSolution {
            epsilon: self.eps,
            bc_mode: self.corr.bc_mode,
            order,
            terms,
            dt: lat.dt,
            snapshot_steps,
            levels,
        })
    }

    /// Check the wall-trace invariants of an assembled approximant.
    pub fn check_traces(&self, scenario: &Scenario, approx: &ApproxSolution) -> Result<TraceAudit> {
        let grid = self.grid;
        let last = grid.nz() - 1;
        let mut audit = TraceAudit::default();
        for snap in approx.snapshots() {
            let wd = crate::viscous::scenario_wall_data(scenario, grid, self.eps, snap.time);
            for w in Wall::BOTH {
                let j = if w == Wall::Lower { 0 } else { last };
                let a1 = scenario.alpha1_at(w, snap.time);
                audit.velocity = audit.velocity.max((snap.u1.values[j] - a1).abs());
                for k in 0..grid.nmodes() {
                    audit.velocity = audit.velocity.max((snap.u2.get(k, j) - wd[w.index()][k][0]).norm());
                }
                match self.corr.bc_mode {
                    BcMode::Dirichlet => {
                        let g1 = scenario.gamma1_at(w, snap.time, self.eps);
                        audit.magnetic = audit.magnetic.max((snap.h1.values[j] - g1).abs());
                        for k in 0..grid.nmodes() {
                            audit.magnetic = audit.magnetic.max((snap.h2.get(k, j) - wd[w.index()][k][1]).norm());
                        }
                    }
                    BcMode::Conducting => {
                        let s1 = ddz_slice(grid, &snap.h1.values)?;
                        let s1max = s1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                        audit.slope_scale = audit.slope_scale.max(s1max);
                        audit.magnetic = audit.magnetic.max(s1[j].abs());
                        let s2 = snap.h2.ddz(grid)?;
                        audit.slope_scale = audit.slope_scale.max(s2.max_abs());
                        for k in 0..grid.nmodes() {
                            audit.magnetic = audit.magnetic.max(s2.get(k, j).norm());
                        }
                    }
                }
            }
        }
        Ok(audit)
    }
}

/// Largest wall-trace deviations over all snapshots.
///
/// `magnetic` is a value mismatch in Dirichlet mode and a one-sided wall
/// slope in conducting mode; `slope_scale` is the largest `|∂z h̃|` seen.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct TraceAudit {
    pub velocity: f64,
    pub magnetic: f64,
    pub slope_scale: f64,
}

/// Equation residuals of an approximant at one snapshot.
#[derive(Debug, Clone)]
pub struct ResidualSnapshot {
    pub time: f64,
    pub u1: Profile1D,
    pub u2: ModalField,
    pub h1: Profile1D,
    pub h2: ModalField,
}

/// Apply the viscous operators (diffusion `epsilon`) to the approximant and
/// subtract the forcing.
pub fn residual(approx: &ApproxSolution, scenario: &Scenario, grid: &ChannelGrid, epsilon: f64) -> Result<Vec<ResidualSnapshot>> {
    let dt = approx.dt;
    approx
        .snapshot_steps
        .par_iter()
        .map(|&s| {
            let cur = approx.level(s).ok_or_else(|| Error::Missing(format!("no level at step {s}")))?;
            let get = |q: usize| approx.level(q);
            type Stencil<'b> = Vec<(&'b ApproxSnapshot, f64)>;
            let stencil: Stencil<'_> = match (s.checked_sub(1).and_then(get), get(s + 1)) {
                (Some(a), Some(b)) => vec![(a, -0.5 / dt), (b, 0.5 / dt)],
                (None, Some(b)) => {
                    let c = get(s + 2).ok_or_else(|| Error::Missing(format!("need steps {s}..{} for ∂t", s + 2)))?;
                    vec![(cur, -1.5 / dt), (b, 2.0 / dt), (c, -0.5 / dt)]
                }
                (Some(a), None) => {
                    let c = s
                        .checked_sub(2)
                        .and_then(get)
                        .ok_or_else(|| Error::Missing(format!("need steps {}..{s} for ∂t", s.saturating_sub(2))))?;
                    vec![(cur, 1.5 / dt), (a, -2.0 / dt), (c, 0.5 / dt)]
                }
                (None, None) => return Err(Error::Missing(format!("no neighbours of step {s} for ∂t"))),
            };
            let t = cur.time;
            let nz = grid.nz();
            let dzz = match &cur.dzz {
                Some(d) => d.clone(),
                None => SnapshotDzz {
                    u1: cur.u1.d2z(grid)?,
                    h1: cur.h1.d2z(grid)?,
                    u2: cur.u2.d2z(grid)?,
                    h2: cur.h2.d2z(grid)?,
                },
            };
            let z = grid.z();
            let r1: Vec<f64> = (0..nz)
                .map(|j| {
                    let dtv: f64 = stencil.iter().map(|(l, w)| w * l.u1.values[j]).sum();
                    dtv - epsilon * dzz.u1.values[j] - (scenario.f1)(t, z[j])
                })
                .collect();
            let r3: Vec<f64> = (0..nz)
                .map(|j| {
                    let dtv: f64 = stencil.iter().map(|(l, w)| w * l.h1.values[j]).sum();
                    dtv - epsilon * dzz.h1.values[j]
                })
                .collect();
            let f2 = if scenario.has_f2() {
                Some(to_modal(&PhysicalField::sample(grid, |x, zz| scenario.f2_at(t, x, zz)), grid)?)
            } else {
                None
            };
            let tang = |main: fn(&ApproxSnapshot) -> &ModalField, other: fn(&ApproxSnapshot) -> &ModalField, mzz: &ModalField| {
                ModalField::zeros_like(grid).with_time(t).map(|k, j, _| {
                    let ik = I * grid.derivative_wavenumber(k);
                    let k2 = grid.wavenumber(k).powi(2);
                    let dtv: Complex64 = stencil.iter().map(|(l, w)| main(l).get(k, j) * *w).sum();
                    let m = main(cur).get(k, j);
                    dtv - (mzz.get(k, j) - m * k2) * epsilon + ik * m * cur.u1.values[j]
                        - ik * other(cur).get(k, j) * cur.h1.values[j]
                })
            };
            let mut r2 = tang(|l| &l.u2, |l| &l.h2, &dzz.u2);
            if let Some(f) = f2 {
                r2 = r2.axpby(1.0, &f, -1.0)?;
            }
            let r4 = tang(|l| &l.h2, |l| &l.u2, &dzz.h2);
            Ok(ResidualSnapshot { time: t, u1: Profile1D::new(r1, t), u2: r2, h1: Profile1D::new(r3, t), h2: r4 })
        })
        .collect()
}

/// Equation an entry of the remainder table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    U1,
    U2,
    H1,
    H2,
}

impl Equation {
    pub const ALL: [Equation; 4] = [Equation::U1, Equation::U2, Equation::H1, Equation::H2];

    pub fn name(self) -> &'static str {
        match self {
            Equation::U1 => "u1",
            Equation::U2 => "u2",
            Equation::H1 => "h1",
            Equation::H2 => "h2",
        }
    }
}

/// A remainder field: axial equations give profiles, tangential ones modal fields.
#[derive(Debug, Clone)]
pub enum TermField {
    Profile(Profile1D),
    Modal(ModalField),
}

impl TermField {
    pub fn l2(&self, grid: &ChannelGrid) -> Result<f64> {
        let n = match self {
            TermField::Profile(p) => norms(&[FieldRef::Profile(p)], grid)?,
            TermField::Modal(m) => norms(&[FieldRef::Modal(m)], grid)?,
        };
        Ok(n.l2)
    }

    fn add(&self, other: &TermField, b: f64) -> Result<TermField> {
        match (self, other) {
            (TermField::Profile(a), TermField::Profile(o)) => Ok(TermField::Profile(a.axpby(1.0, o, b)?)),
            (TermField::Modal(a), TermField::Modal(o)) => Ok(TermField::Modal(a.axpby(1.0, o, b)?)),
            _ => Err(Error::Dimension("mixed remainder field kinds".into())),
        }
    }
}

/// A named remainder at one snapshot.
#[derive(Debug, Clone)]
pub struct Term {
    pub name: &'static str,
    pub equation: Equation,
    pub field: TermField,
}

/// Literal term forms that disagree with the mirror construction, and their
/// corrected counterparts: `(literal, corrected)`.
pub const FLAGGED_PAIRS: [(&str, &str); 8] = [
    ("H", "H~"),
    ("G1", "G1~"),
    ("J1", "J1~"),
    ("Dhat", "Dhat~"),
    ("Ihat", "Ihat~"),
    ("Mhat", "Mhat~"),
    ("Nhat", "Nhat~"),
    ("Jhat", "Jhat~"),
];

/// Literal term names summed per equation for a configuration.
pub fn term_sums(bc_mode: BcMode, order: u8) -> Vec<(Equation, Vec<&'static str>)> {
    match (order, bc_mode) {
        (0, BcMode::Conducting) => vec![
            (Equation::U1, vec!["A", "B"]),
            (Equation::U2, vec!["C", "D1", "E1"]),
            (Equation::H1, vec!["F1", "G1", "G2"]),
            (Equation::H2, vec!["H", "I1", "J1", "J2"]),
        ],
        (0, BcMode::Dirichlet) => vec![
            (Equation::U1, vec!["A", "B"]),
            (Equation::U2, vec!["C", "D", "E"]),
            (Equation::H1, vec!["F", "G"]),
            (Equation::H2, vec!["H", "I", "J"]),
        ],
        _ => vec![
            (Equation::U1, vec!["A", "B"]),
            (Equation::U2, vec!["C", "Dhat", "Ehat", "Mhat"]),
            (Equation::H1, vec!["F", "G"]),
            (Equation::H2, vec!["H", "Ihat", "Jhat", "Nhat"]),
        ],
    }
}

/// Replace literal names by their corrected counterparts.
pub fn corrected_names(names: &[&'static str]) -> Vec<&'static str> {
    names
        .iter()
        .map(|n| FLAGGED_PAIRS.iter().find(|(p, _)| p == n).map_or(*n, |(_, c)| *c))
        .collect()
}

impl Composer<'_> {
    /// Evaluate every literal remainder (and corrected variants) at one step.
    pub fn remainder_terms(&self, step: usize) -> Result<Vec<Term>> {
        let grid = self.grid;
        let t = self.corr.lattice.time(step);
        let op = self.outer_parts(t)?;
        let ly = [self.layer(Wall::Lower, step)?, self.layer(Wall::Upper, step)?];
        let eps = self.eps;
        let sq = eps.sqrt();
        let e32 = eps * sq;
        let nz = grid.nz();
        let nm = grid.nmodes();
        let ik: Vec<Complex64> = (0..nm).map(|k| I * grid.derivative_wavenumber(k)).collect();
        let k2: Vec<f64> = (0..nm).map(|k| grid.wavenumber(k).powi(2)).collect();
        let sgn = [1.0, -1.0];
        let zeta = |w: usize, j: usize| ly[w].geo.zeta[j].unwrap_or(0.0);
        // Lower-wall stretched coordinate at any node (used where the literal form has it).
        let zeta_lower_any = |j: usize| grid.z()[j] / sq;
        let cut = |w: usize, j: usize| ly[w].geo.cut[j];
        let u1o = &op.snap.u1.values;
        let h1o = &op.snap.h1.values;

        let profile = |f: &dyn Fn(usize) -> f64| TermField::Profile(Profile1D::new((0..nz).map(f).collect(), t));
        let modal = |f: &(dyn Fn(usize, usize) -> Complex64 + Sync)| {
            TermField::Modal(ModalField::zeros_like(grid).with_time(t).map(|k, j, _| f(k, j)))
        };
        let mut out: Vec<Term> = Vec::new();
        let mut push = |name: &'static str, equation: Equation, field: TermField| out.push(Term { name, equation, field });

        // Axial equations.
        push("A", Equation::U1, profile(&|j| -2.0 * sq * (0..2).map(|w| cut(w, j)[1] * ly[w].theta1.z[j]).sum::<f64>()));
        push(
            "B",
            Equation::U1,
            profile(&|j| -eps * (op.u1_zz[j] + (0..2).map(|w| cut(w, j)[2] * ly[w].theta1.v[j]).sum::<f64>())),
        );
        let f_term = |j: usize| -2.0 * sq * (0..2).map(|w| cut(w, j)[1] * ly[w].h1.z[j]).sum::<f64>();
        let g_term = |j: usize| -eps * (op.h1_zz[j] + (0..2).map(|w| cut(w, j)[2] * ly[w].h1.v[j]).sum::<f64>());
        push("F", Equation::H1, profile(&f_term));
        push("G", Equation::H1, profile(&g_term));
        push(
            "F1",
            Equation::H1,
            profile(&|j| f_term(j) - sq * (0..2).map(|w| cut(w, j)[0] * ly[w].eta1.zz[j]).sum::<f64>()),
        );
        push(
            "G1",
            Equation::H1,
            profile(&|j| g_term(j) - 2.0 * eps * (cut(0, j)[1] * ly[0].eta1.z[j] - cut(1, j)[1] * ly[1].eta1.z[j])),
        );
        push(
            "G1~",
            Equation::H1,
            profile(&|j| g_term(j) - 2.0 * eps * (0..2).map(|w| cut(w, j)[1] * ly[w].eta1.z[j]).sum::<f64>()),
        );
        push("G2", Equation::H1, profile(&|j| -e32 * (0..2).map(|w| cut(w, j)[2] * ly[w].eta1.v[j]).sum::<f64>()));

        // Tangential equations, order 0.
        let c_term = |main: usize, k: usize, j: usize| -> Complex64 {
            (0..2)
                .map(|w| {
                    let [c, _, _] = cut(w, j);
                    let l = &ly[w];
                    let (a, b) = if main == 0 {
                        (l.theta1.v[j] * ik[k] * l.theta2.v.get(k, j), l.h1.v[j] * ik[k] * l.h2.v.get(k, j))
                    } else {
                        (l.theta1.v[j] * ik[k] * l.h2.v.get(k, j), l.h1.v[j] * ik[k] * l.theta2.v.get(k, j))
                    };
                    (a - b) * (c * (c - 1.0))
                })
                .sum()
        };
        push("C", Equation::U2, modal(&|k, j| c_term(0, k, j)));
        let h_literal = |k: usize, j: usize| -> Complex64 {
            let l = &ly[0];
            let [c, _, _] = cut(0, j);
            let lower = (l.theta1.v[j] * ik[k] * l.h2.v.get(k, j) - l.h1.v[j] * ik[k] * l.theta2.v.get(k, j)) * (c * (c - 1.0));
            let u = &ly[1];
            let [cu, _, _] = cut(1, j);
            let upper = (u.theta1.v[j] * ik[k] * u.h2.v.get(k, j) - u.h1.v[j] * ik[k] * u.h2.v.get(k, j)) * (cu * (cu - 1.0));
            lower + upper
        };
        push("H", Equation::H2, modal(&h_literal));
        push("H~", Equation::H2, modal(&|k, j| c_term(1, k, j)));

        // D and I: first Taylor terms of the outer coefficients.
        let taylor1 = |main: usize, k: usize, j: usize| -> Complex64 {
            let mut acc = ZERO;
            for w in 0..2 {
                let [c, c1, _] = cut(w, j);
                let l = &ly[w];
                let z = zeta(w, j);
                let [du1, _, dh1, _] = op.wall_axial[w];
                let m = &op.wall_modal[w];
                let (th, hh) = (l.theta2.v.get(k, j), l.h2.v.get(k, j));
                let (dzu2, dzh2) = (m[0][k], m[2][k]);
                let inner = if main == 0 {
                    ik[k] * th * du1 + ik[k] * dzu2 * l.theta1.v[j] - ik[k] * hh * dh1 - ik[k] * dzh2 * l.h1.v[j]
                } else {
                    ik[k] * hh * du1 + ik[k] * dzh2 * l.theta1.v[j] - ik[k] * th * dh1 - ik[k] * dzu2 * l.h1.v[j]
                };
                let dz = if main == 0 { l.theta2.z.get(k, j) } else { l.h2.z.get(k, j) };
                acc += inner * (sgn[w] * c * z) - dz * (2.0 * c1);
            }
            acc * sq
        };
        let diff0 = |main: usize, k: usize, j: usize| -> Complex64 {
            let lap = if main == 0 { op.u2_lap.get(k, j) } else { op.h2_lap.get(k, j) };
            let mut acc = -lap;
            for (w, l) in ly.iter().enumerate() {
                let [c, _, c2] = cut(w, j);
                let v = if main == 0 { l.theta2.v.get(k, j) } else { l.h2.v.get(k, j) };
                acc += v * (c * k2[k] - c2);
            }
            acc * eps
        };
        push("D", Equation::U2, modal(&|k, j| taylor1(0, k, j)));
        push("E", Equation::U2, modal(&|k, j| diff0(0, k, j)));
        push("I", Equation::H2, modal(&|k, j| taylor1(1, k, j)));
        push("J", Equation::H2, modal(&|k, j| diff0(1, k, j)));

        // η corrections.
        let d1_extra = |k: usize, j: usize| -> Complex64 {
            let mut acc = ZERO;
            for (w, l) in ly.iter().enumerate() {
                let [c, _, _] = cut(w, j);
                let e1 = l.eta1.v[j];
                let e2 = l.eta2.v.get(k, j);
                acc += ik[k] * e2 * (c * c * l.h1.v[j]) + ik[k] * op.snap.h2.get(k, j) * (c * e1)
                    + ik[k] * l.h2.v.get(k, j) * (c * c * e1)
                    + ik[k] * e2 * (c * h1o[j]);
            }
            -acc * sq
        };
        push("D1", Equation::U2, modal(&|k, j| taylor1(0, k, j) + d1_extra(k, j)));
        let e1_extra = |k: usize, j: usize| -> Complex64 {
            -(0..2).map(|w| ik[k] * ly[w].eta2.v.get(k, j) * (cut(w, j)[0].powi(2) * ly[w].eta1.v[j])).sum::<Complex64>() * eps
        };
        push("E1", Equation::U2, modal(&|k, j| diff0(0, k, j) + e1_extra(k, j)));
        let i1_extra = |k: usize, j: usize| -> Complex64 {
            let mut acc = ZERO;
            for (w, l) in ly.iter().enumerate() {
                let [c, _, _] = cut(w, j);
                let e1 = l.eta1.v[j];
                let e2 = l.eta2.v.get(k, j);
                let shape = eta_shape(zeta(w, j))[0];
                let rate = if l.geo.zeta[j].is_some() { l.eta2_rate[k] * shape } else { ZERO };
                acc += rate * c - l.eta2.zz.get(k, j) * c + ik[k] * e2 * (c * u1o[j]) + ik[k] * e2 * (c * c * l.theta1.v[j])
                    - ik[k] * op.snap.u2.get(k, j) * (c * e1)
                    - ik[k] * l.theta2.v.get(k, j) * (c * c * e1);
            }
            acc * sq
        };
        push("I1", Equation::H2, modal(&|k, j| taylor1(1, k, j) + i1_extra(k, j)));
        push(
            "J1",
            Equation::H2,
            modal(&|k, j| diff0(1, k, j) - (ly[0].eta2.z.get(k, j) * cut(0, j)[1] + ly[1].eta2.z.get(k, j) * cut(1, j)[2]) * (2.0 * eps)),
        );
        push(
            "J1~",
            Equation::H2,
            modal(&|k, j| diff0(1, k, j) - (0..2).map(|w| ly[w].eta2.z.get(k, j) * cut(w, j)[1]).sum::<Complex64>() * (2.0 * eps)),
        );
        push(
            "J2",
            Equation::H2,
            modal(&|k, j| -(0..2).map(|w| ly[w].eta2.v.get(k, j) * (cut(w, j)[2] - cut(w, j)[0] * k2[k])).sum::<Complex64>() * e32),
        );

        // First-order terms.
        let hat_c = |main: usize, k: usize, j: usize, fix: bool| -> Complex64 {
            let mut acc = ZERO;
            let mut extra = ZERO;
            for (w, l) in ly.iter().enumerate() {
                let [c, c1, _] = cut(w, j);
                let (a, b) = if main == 0 {
                    (l.theta1.v[j] * ik[k] * l.theta2_1.v.get(k, j), l.h1.v[j] * ik[k] * l.h2_1.v.get(k, j))
                } else {
                    (l.theta1.v[j] * ik[k] * l.h2_1.v.get(k, j), l.h1.v[j] * ik[k] * l.theta2_1.v.get(k, j))
                };
                let dz0 = if main == 0 { l.theta2.z.get(k, j) } else { l.h2.z.get(k, j) };
                let dz1 = if main == 0 { l.theta2_1.z.get(k, j) } else { l.h2_1.z.get(k, j) };
                acc += (a - b) * (c * (c - 1.0)) - dz0 * (2.0 * c1);
                extra += dz1 * (-2.0 * c1);
            }
            acc * sq + if fix { extra * eps } else { ZERO }
        };
        push("Dhat", Equation::U2, modal(&|k, j| hat_c(0, k, j, false)));
        push("Dhat~", Equation::U2, modal(&|k, j| hat_c(0, k, j, true)));
        push("Ihat", Equation::H2, modal(&|k, j| hat_c(1, k, j, false)));
        push("Ihat~", Equation::H2, modal(&|k, j| hat_c(1, k, j, true)));

        let taylor2 = |main: usize, k: usize, j: usize, fix: bool| -> Complex64 {
            let mut acc = ZERO;
            for (w, l) in ly.iter().enumerate() {
                let [c, _, _] = cut(w, j);
                if c == 0.0 {
                    continue;
                }
                let z = zeta(w, j);
                let zq = if main == 1 && w == 1 && !fix { zeta_lower_any(j) } else { z };
                let [du1, ddu1, dh1, ddh1] = op.wall_axial[w];
                let m = &op.wall_modal[w];
                let (th0, hh0) = (l.theta2.v.get(k, j), l.h2.v.get(k, j));
                let (th1, hh1) = (l.theta2_1.v.get(k, j), l.h2_1.v.get(k, j));
                let (ddu2, ddh2) = (m[1][k], m[3][k]);
                let s = sgn[w];
                let inner = if main == 0 {
                    ik[k] * th1 * (s * z * du1) + ik[k] * th0 * (0.5 * ddu1 * z * z) + ik[k] * ddu2 * (0.5 * z * z * l.theta1.v[j])
                        - ik[k] * hh1 * (s * z * dh1)
                        - ik[k] * hh0 * (0.5 * ddh1 * z * z)
                        - ik[k] * ddh2 * (0.5 * z * z * l.h1.v[j])
                } else {
                    ik[k] * hh1 * (s * z * du1) + ik[k] * hh0 * (0.5 * ddu1 * zq * zq) + ik[k] * ddh2 * (0.5 * z * z * l.theta1.v[j])
                        - ik[k] * th1 * (s * z * dh1)
                        - ik[k] * th0 * (0.5 * ddh1 * z * z)
                        - ik[k] * ddu2 * (0.5 * z * z * l.h1.v[j])
                };
                acc += inner * c;
            }
            acc * eps + diff0(main, k, j)
        };
        push("Ehat", Equation::U2, modal(&|k, j| taylor2(0, k, j, false)));
        push("Jhat", Equation::H2, modal(&|k, j| taylor2(1, k, j, false)));
        push("Jhat~", Equation::H2, modal(&|k, j| taylor2(1, k, j, true)));

        let hat_m = |main: usize, k: usize, j: usize, fix: bool| -> Complex64 {
            let mut acc = ZERO;
            for (w, l) in ly.iter().enumerate() {
                let [c, _, c2] = cut(w, j);
                let z = zeta(w, j);
                let [_, ddu1, _, ddh1] = op.wall_axial[w];
                let (own, other) = if main == 0 {
                    (l.theta2_1.v.get(k, j), l.h2_1.v.get(k, j))
                } else {
                    (l.h2_1.v.get(k, j), l.theta2_1.v.get(k, j))
                };
                acc += -own * c2 + (ik[k] * own * (0.5 * ddu1 * z * z) + own * k2[k]) * c;
                let cross = if fix { ZERO } else { other * k2[k] };
                acc -= (ik[k] * other * (0.5 * ddh1 * z * z) + cross) * c;
            }
            acc * e32
        };
        push("Mhat", Equation::U2, modal(&|k, j| hat_m(0, k, j, false)));
        push("Mhat~", Equation::U2, modal(&|k, j| hat_m(0, k, j, true)));
        push("Nhat", Equation::H2, modal(&|k, j| hat_m(1, k, j, false)));
        push("Nhat~", Equation::H2, modal(&|k, j| hat_m(1, k, j, true)));
        // Ehat has no flagged form; its corrected name maps to itself.
        Ok(out)
    }
}

/// Per-equation agreement of substitution residuals with literal-term sums.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckRow {
    pub equation: Equation,
    pub terms: Vec<&'static str>,
    /// `sup_t ‖R‖_{L²}`.
    pub residual: f64,
    /// `sup_t ‖R − Σ literal‖ / sup_t ‖R‖`.
    pub literal_gap: f64,
    /// Same with flagged terms replaced by their corrected forms.
    pub corrected_gap: f64,
}

/// One flagged term: `sup_t ‖literal − corrected‖_{L²}`.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub term: &'static str,
    pub corrected: &'static str,
    pub l2: f64,
}

/// Per-term `L²` norms at one time.
#[derive(Debug, Clone, Serialize)]
pub struct TermNorm {
    pub t: f64,
    pub term: &'static str,
    pub equation: Equation,
    pub l2: f64,
    /// `‖literal − corrected‖` for flagged terms.
    pub discrepancy: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub epsilon: f64,
    pub bc_mode: BcMode,
    pub order: u8,
    pub rows: Vec<CrossCheckRow>,
    pub discrepancies: Vec<Discrepancy>,
    pub term_norms: Vec<TermNorm>,
}

impl Composer<'_> {
    /// Compare the substitution residual with the literal remainder sums at every
    /// snapshot after the initial one.
    pub fn cross_check(&self, scenario: &Scenario, approx: &ApproxSolution) -> Result<CrossCheck> {
        let grid = self.grid;
        let mut approx = approx.clone();
        approx.snapshot_steps.retain(|&s| s > 0);
        let approx = &approx;
        let res = residual(approx, scenario, grid, self.eps)?;
        let sums = term_sums(approx.bc_mode, approx.order);
        let per_snap = approx
            .snapshot_steps
            .par_iter()
            .zip(res.par_iter())
            .map(|(&step, r)| -> Result<_> {
                let terms = self.remainder_terms(step)?;
                let find = |n: &str| terms.iter().find(|t| t.name == n).map(|t| &t.field);
                let mut eq_rows = Vec::new();
                for (eq, names) in &sums {
                    let rf = match eq {
                        Equation::U1 => TermField::Profile(r.u1.clone()),
                        Equation::U2 => TermField::Modal(r.u2.clone()),
                        Equation::H1 => TermField::Profile(r.h1.clone()),
                        Equation::H2 => TermField::Modal(r.h2.clone()),
                    };
                    let gap = |ns: &[&'static str]| -> Result<f64> {
                        let mut d = rf.clone();
                        for n in ns {
                            let f = find(n).ok_or_else(|| Error::Missing(format!("remainder term {n}")))?;
                            d = d.add(f, -1.0)?;
                        }
                        d.l2(grid)
                    };
                    eq_rows.push((*eq, rf.l2(grid)?, gap(names)?, gap(&corrected_names(names))?));
                }
                let mut disc = Vec::new();
                for (p, c) in FLAGGED_PAIRS {
                    if let (Some(a), Some(b)) = (find(p), find(c)) {
                        disc.push(a.add(b, -1.0)?.l2(grid)?);
                    }
                }
                let norms: Vec<TermNorm> = terms
                    .iter()
                    .map(|t| {
                        let discrepancy = match FLAGGED_PAIRS.iter().find(|(p, _)| *p == t.name).and_then(|(_, c)| find(c)) {
                            Some(c) => Some(t.field.add(c, -1.0)?.l2(grid)?),
                            None => None,
                        };
                        Ok(TermNorm { t: r.time, term: t.name, equation: t.equation, l2: t.field.l2(grid)?, discrepancy })
                    })
                    .collect::<Result<_>>()?;
                Ok((eq_rows, disc, norms))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for (i, (eq, names)) in sums.iter().enumerate() {
            let r = per_snap.iter().map(|p| p.0[i].1).fold(0.0, f64::max);
            let pg = per_snap.iter().map(|p| p.0[i].2).fold(0.0, f64::max);
            let cg = per_snap.iter().map(|p| p.0[i].3).fold(0.0, f64::max);
            let scale = if r > 0.0 { r } else { 1.0 };
            rows.push(CrossCheckRow {
                equation: *eq,
                terms: names.clone(),
                residual: r,
                literal_gap: pg / scale,
                corrected_gap: cg / scale,
            });
        }
        let discrepancies = FLAGGED_PAIRS
            .iter()
            .enumerate()
            .map(|(i, (p, c))| Discrepancy {
                term: p,
                corrected: c,
                l2: per_snap.iter().map(|s| s.1.get(i).copied().unwrap_or(0.0)).fold(0.0, f64::max),
            })
            .collect();
        let term_norms = per_snap.into_iter().flat_map(|p| p.2).collect();
        Ok(CrossCheck { epsilon: self.eps, bc_mode: approx.bc_mode, order: approx.order, rows, discrepancies, term_norms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_plateaus_and_midpoint() {
        assert_eq!(psi(0.2).unwrap()[0], 1.0);
        assert_eq!(psi(0.7).unwrap()[0], 0.0);
        assert!((psi(5.0 / 12.0).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!(psi(1.5).is_err());
        assert_eq!(rho(0.5).unwrap()[0], 1.0);
        assert_eq!(rho(2.5).unwrap()[0], 0.0);
        assert!(rho(-0.1).is_err());
    }

    #[test]
    fn cutoffs_are_disjoint() {
        for i in 0..=10_000 {
            let z = i as f64 / 10_000.0;
            assert_eq!(psi(z).unwrap()[0] * psi(1.0 - z).unwrap()[0], 0.0);
        }
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        let h = 1e-5;
        for &z in &[0.35, 0.4, 5.0 / 12.0, 0.47] {
            let [_, d1, d2] = psi(z).unwrap();
            let fd1 = (psi(z + h).unwrap()[0] - psi(z - h).unwrap()[0]) / (2.0 * h);
            let fd2 = (psi(z + h).unwrap()[0] - 2.0 * psi(z).unwrap()[0] + psi(z - h).unwrap()[0]) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 && (d2 - fd2).abs() < 1e-3);
        }
    }

    #[test]
    fn eta_shape_wall_slope_is_one() {
        let s = eta_shape(0.0);
        assert_eq!(s, [0.0, 1.0, 0.0]);
        assert_eq!(eta_shape(2.5), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn bl_derivatives_of_quadratic_are_exact() {
        let h = 0.1;
        let v: Vec<f64> = (0..20).map(|i| (i as f64 * h).powi(2)).collect();
        let (d1, d2) = bl_derivs(&v, h);
        for i in 0..20 {
            assert!((d1[i] - 2.0 * i as f64 * h).abs() < 1e-10);
            assert!((d2[i] - 2.0).abs() < 1e-8);
        }
    }
}
