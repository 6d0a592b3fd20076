//! The full viscous plane-parallel system on the wall-graded channel mesh.
//!
//! Axial components are scalar heat problems in `z`; the tangential pair is
//! advanced per Fourier mode with a 2×2 block Crank–Nicolson step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::deriv::fornberg_weights;
use crate::fields::{line_modes, to_modal, ChannelGrid, ModalField, PhysicalField, Profile1D, Wall};
use crate::linalg::{solve_tridiagonal, BlockTridiagonal, Pair};
use crate::prandtl::BcKind;
use crate::scenario::{BcMode, Numerics, Scenario, TimeLattice};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const ZERO_ORDER_TOL: f64 = 1e-10;
pub const FIRST_ORDER_TOL: f64 = 1e-8;

/// One time level of the viscous solution.
#[derive(Debug, Clone)]
pub struct ViscousState {
    pub time: f64,
    pub u1: Profile1D,
    pub h1: Profile1D,
    pub u2: ModalField,
    pub h2: ModalField,
}

/// A viscous run: snapshots at the lattice cadence plus run metadata.
#[derive(Debug, Clone)]
pub struct ViscousRun {
    pub epsilon: f64,
    pub bc_mode: BcMode,
    pub lattice: TimeLattice,
    pub states: Vec<ViscousState>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatRow {
    pub order: u8,
    pub condition: String,
    pub wall: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub scenario: String,
    pub bc_mode: BcMode,
    pub epsilon: f64,
    pub rows: Vec<CompatRow>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&CompatRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }
}

const FD_H: f64 = 0.02;
const FD_HT: f64 = 1e-3;

/// Centered thirteen-point derivative of order `m` at `x0`.
fn central(f: impl Fn(f64) -> f64, x0: f64, m: usize) -> f64 {
    let xs: Vec<f64> = (-6..=6).map(|i| x0 + i as f64 * FD_H).collect();
    let w = fornberg_weights(x0, &xs, m);
    xs.iter().zip(&w[m]).map(|(&x, &c)| c * f(x)).sum()
}

/// Forward thirteen-point first derivative at `t = 0`.
fn forward_dt(f: impl Fn(f64) -> f64) -> f64 {
    let ts: Vec<f64> = (0..13).map(|i| i as f64 * FD_HT).collect();
    let w = fornberg_weights(0.0, &ts, 1);
    ts.iter().zip(&w[1]).map(|(&t, &c)| c * f(t)).sum()
}

/// Residuals of the zero-order (and, for `order = 1`, first-order)
/// compatibility conditions at both walls.
pub fn check_compatibility(s: &Scenario, order: u8, epsilon: f64) -> CompatReport {
    let xs: Vec<f64> = (0..64).map(|i| s.length * i as f64 / 64.0).collect();
    let mut rows = Vec::new();
    let mut push = |order: u8, condition: &str, wall: Wall, residual: f64| {
        let tolerance = if order == 0 { ZERO_ORDER_TOL } else { FIRST_ORDER_TOL };
        rows.push(CompatRow {
            order,
            condition: condition.to_string(),
            wall: wall.name(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        });
    };
    let maxx = |g: &dyn Fn(f64) -> f64| xs.iter().map(|&x| g(x).abs()).fold(0.0, f64::max);
    let eps = epsilon;
    for wall in Wall::BOTH {
        let zi = wall.coordinate();
        push(0, "alpha1(0) = a(i)", wall, ((s.alpha1[wall.index()])(0.0) - (s.a)(zi)).abs());
        push(0, "alpha2(0,x) = b(x,i)", wall, maxx(&|x| s.alpha2_at(wall, 0.0, x) - (s.b)(x, zi)));
        match s.bc_mode {
            BcMode::Conducting => {
                push(0, "dz c(i) = 0", wall, central(|z| (s.c)(z), zi, 1).abs());
                push(0, "dz d(x,i) = 0", wall, maxx(&|x| central(|z| (s.d)(x, z), zi, 1)));
            }
            BcMode::Dirichlet => {
                push(0, "gamma1(0) = c(i)", wall, (s.gamma1_at(wall, 0.0, eps) - (s.c)(zi)).abs());
                push(0, "gamma2(0,x) = d(x,i)", wall, maxx(&|x| s.gamma2_at(wall, 0.0, x, eps) - (s.d)(x, zi)));
            }
        }
        if order < 1 {
            continue;
        }
        let dx = |f: &dyn Fn(f64, f64) -> f64, x: f64| central(|y| f(y, zi), x, 1);
        let lap = |f: &dyn Fn(f64, f64) -> f64, x: f64| central(|y| f(y, zi), x, 2) + central(|z| f(x, z), zi, 2);
        let (a, c) = ((s.a)(zi), (s.c)(zi));
        let r = forward_dt(|t| s.alpha1_at(wall, t)) - eps * central(|z| (s.a)(z), zi, 2) - (s.f1)(0.0, zi);
        push(1, "dt alpha1(0) - eps a''(i) = f1(0,i)", wall, r.abs());
        let b = |x: f64, z: f64| (s.b)(x, z);
        let d = |x: f64, z: f64| (s.d)(x, z);
        let r = maxx(&|x| {
            forward_dt(|t| s.alpha2_at(wall, t, x)) - eps * lap(&b, x) + a * dx(&b, x) - c * dx(&d, x)
                - s.f2_at(0.0, x, zi)
        });
        push(1, "dt alpha2(0,x) - eps lap b + a b_x - c d_x = f2(0,x,i)", wall, r);
        match s.bc_mode {
            BcMode::Conducting => {
                push(1, "-eps c'''(i) = 0", wall, (eps * central(|z| (s.c)(z), zi, 3)).abs());
                let r = maxx(&|x| {
                    let lap_dz = central(|y| central(|z| (s.d)(y, z), zi, 1), x, 2) + central(|z| (s.d)(x, z), zi, 3);
                    let flux = central(
                        |z| {
                            let dxd = central(|y| (s.d)(y, z), x, 1);
                            let dxb = central(|y| (s.b)(y, z), x, 1);
                            (s.a)(z) * dxd - (s.c)(z) * dxb
                        },
                        zi,
                        1,
                    );
                    -eps * lap_dz + flux
                });
                push(1, "-eps lap dz d + dz(a d_x - c b_x) = 0", wall, r);
            }
            BcMode::Dirichlet => {
                let r = forward_dt(|t| s.gamma1_at(wall, t, eps)) - eps * central(|z| (s.c)(z), zi, 2);
                push(1, "dt gamma1(0) - eps c''(i) = 0", wall, r.abs());
                let r = maxx(&|x| {
                    forward_dt(|t| s.gamma2_at(wall, t, x, eps)) - eps * lap(&d, x) + a * dx(&d, x) - c * dx(&b, x)
                });
                push(1, "dt gamma2(0,x) - eps lap d + a d_x - c b_x = 0", wall, r);
            }
        }
    }
    CompatReport { scenario: s.name.clone(), bc_mode: s.bc_mode, epsilon, rows }
}

/// Wall condition of an axial problem: kind and data `g(t)` (value or slope).
pub type AxialWall<'a> = (BcKind, &'a (dyn Fn(f64) -> f64 + Sync));

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive (got {dt})")));
    }
    Ok(())
}

/// Crank–Nicolson march of `∂t v − ε ∂zz v = f(t, z)`; returns every step.
pub fn solve_axial(
    epsilon: f64,
    initial: &Profile1D,
    walls: [AxialWall<'_>; 2],
    forcing: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
    grid: &ChannelGrid,
    lattice: &TimeLattice,
) -> Result<Vec<Profile1D>> {
    check_dt(lattice.dt)?;
    initial.check_grid(grid)?;
    let nz = grid.nz();
    let last = nz - 1;
    let m = nz - 2;
    let z = grid.z();
    let dt = lattice.dt;
    let r = 0.5 * dt * epsilon;
    let mut v = initial.values.clone();
    let mut out = Vec::with_capacity(lattice.steps + 1);
    out.push(Profile1D::new(v.clone(), 0.0));
    let (w0, w1) = (grid.d1_stencil(0).1, grid.d1_stencil(last).1);
    let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for step in 0..lattice.steps {
        let th = lattice.time(step) + 0.5 * dt;
        let tn = lattice.time(step + 1);
        for j in 1..=m {
            let c = grid.d2_stencil(j);
            let lap = c[0] * v[j - 1] + c[1] * v[j] + c[2] * v[j + 1];
            rhs[j - 1] = v[j] + r * lap + forcing.map_or(0.0, |f| dt * f(th, z[j]));
            lo[j - 1] = -r * c[0];
            di[j - 1] = 1.0 - r * c[1];
            up[j - 1] = -r * c[2];
        }
        let (gl, gu) = ((walls[0].1)(tn), (walls[1].1)(tn));
        let a_lo = -r * grid.d2_stencil(1)[0];
        match walls[0].0 {
            BcKind::Dirichlet => rhs[0] -= a_lo * gl,
            BcKind::Neumann => {
                di[0] -= a_lo * w0[1] / w0[0];
                up[0] -= a_lo * w0[2] / w0[0];
                rhs[0] -= a_lo * gl / w0[0];
            }
        }
        let a_up = -r * grid.d2_stencil(last - 1)[2];
        match walls[1].0 {
            BcKind::Dirichlet => rhs[m - 1] -= a_up * gu,
            BcKind::Neumann => {
                di[m - 1] -= a_up * w1[1] / w1[2];
                lo[m - 1] -= a_up * w1[0] / w1[2];
                rhs[m - 1] -= a_up * gu / w1[2];
            }
        }
        solve_tridiagonal(&lo, &di, &up, &mut rhs)?;
        v[1..=m].copy_from_slice(&rhs);
        v[0] = match walls[0].0 {
            BcKind::Dirichlet => gl,
            BcKind::Neumann => (gl - w0[1] * v[1] - w0[2] * v[2]) / w0[0],
        };
        v[last] = match walls[1].0 {
            BcKind::Dirichlet => gu,
            BcKind::Neumann => (gu - w1[0] * v[last - 2] - w1[1] * v[last - 1]) / w1[2],
        };
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite(format!("axial march at t={tn}")));
        }
        out.push(Profile1D::new(v.clone(), tn));
    }
    Ok(out)
}

/// Per-mode wall data of the tangential pair at one time: `[lower, upper]`,
/// each `(u2 value, h2 value or slope)` per mode.
pub type TangentialWallData = [Vec<Pair>; 2];

/// Inputs of a tangential viscous march beyond the axial series.
pub struct TangentialProblem<'a> {
    pub epsilon: f64,
    pub bc_h: BcKind,
    pub u2_0: ModalField,
    pub h2_0: ModalField,
    /// Wall data at a given time.
    pub walls: &'a (dyn Fn(f64) -> Result<TangentialWallData> + Sync),
    /// Modal sources of the two equations at a given time.
    pub sources: Option<&'a (dyn Fn(f64) -> Result<(ModalField, ModalField)> + Sync)>,
}

/// Per-step hook receiving `(step, u2, h2)` after each accepted step.
pub type StepHook<'a> = dyn FnMut(usize, &ModalField, &ModalField) + 'a;

/// March the tangential pair; returns states at the lattice snapshots.
pub fn solve_tangential_viscous(
    p: &TangentialProblem<'_>,
    u1: &[Profile1D],
    h1: &[Profile1D],
    grid: &ChannelGrid,
    lattice: &TimeLattice,
    mut hook: Option<&mut StepHook<'_>>,
) -> Result<Vec<(ModalField, ModalField)>> {
    check_dt(lattice.dt)?;
    if u1.len() != lattice.steps + 1 || h1.len() != lattice.steps + 1 {
        return Err(Error::Dimension(format!(
            "axial series of length {}/{} on a lattice of {} steps",
            u1.len(),
            h1.len(),
            lattice.steps
        )));
    }
    p.u2_0.check_grid(grid)?;
    p.h2_0.check_grid(grid)?;
    let nz = grid.nz();
    let nm = grid.nmodes();
    let last = nz - 1;
    let m = nz - 2;
    let dt = lattice.dt;
    let eps = p.epsilon;
    let mut state: Vec<Vec<Pair>> =
        (0..nm).map(|k| (0..nz).map(|j| [p.u2_0.get(k, j), p.h2_0.get(k, j)]).collect()).collect();
    let snapshot = |state: &[Vec<Pair>], t: f64| {
        let mut u = ModalField::zeros(grid.nx(), nz).with_time(t);
        let mut h = ModalField::zeros(grid.nx(), nz).with_time(t);
        for (k, col) in state.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                u.set(k, j, v[0]);
                h.set(k, j, v[1]);
            }
        }
        (u, h)
    };
    let mut out = vec![snapshot(&state, 0.0)];
    let (w0, w1) = (grid.d1_stencil(0).1, grid.d1_stencil(last).1);
    let mut a = vec![0.0; nz];
    let mut b = vec![0.0; nz];
    for step in 0..lattice.steps {
        let th = lattice.time(step) + 0.5 * dt;
        let tn = lattice.time(step + 1);
        for j in 0..nz {
            a[j] = 0.5 * (u1[step].values[j] + u1[step + 1].values[j]);
            b[j] = 0.5 * (h1[step].values[j] + h1[step + 1].values[j]);
        }
        let src = match p.sources {
            Some(f) => Some(f(th)?),
            None => None,
        };
        let wd = (p.walls)(tn)?;
        state.par_iter_mut().enumerate().try_for_each(|(k, v)| -> Result<()> {
            let kk = grid.derivative_wavenumber(k);
            let k2 = grid.wavenumber(k).powi(2);
            let ik = I * kk;
            let half = 0.5 * dt;
            let mut sys = BlockTridiagonal::zeros(m);
            let mut rhs = vec![[ZERO; 2]; m];
            for j in 1..=m {
                let c = grid.d2_stencil(j);
                let (aj, bj) = (ik * a[j], ik * b[j]);
                let mv = [-(aj * v[j][0]) + bj * v[j][1], bj * v[j][0] - aj * v[j][1]];
                let mut row = [ZERO; 2];
                for q in 0..2 {
                    let lap = v[j - 1][q] * c[0] + v[j][q] * (c[1] - k2) + v[j + 1][q] * c[2];
                    row[q] = v[j][q] + lap * (half * eps) + mv[q] * half;
                    if let Some((su, sh)) = &src {
                        row[q] += if q == 0 { su.get(k, j) } else { sh.get(k, j) } * dt;
                    }
                }
                rhs[j - 1] = row;
                let d = Complex64::new(1.0 - half * eps * (c[1] - k2), 0.0);
                sys.diag[j - 1] = [[d + aj * half, -(bj * half)], [-(bj * half), d + aj * half]];
                let l = Complex64::new(-half * eps * c[0], 0.0);
                let u = Complex64::new(-half * eps * c[2], 0.0);
                sys.lower[j - 1] = [[l, ZERO], [ZERO, l]];
                sys.upper[j - 1] = [[u, ZERO], [ZERO, u]];
            }
            let (gl, gu) = (wd[0][k], wd[1][k]);
            let a_lo = -half * eps * grid.d2_stencil(1)[0];
            let a_up = -half * eps * grid.d2_stencil(last - 1)[2];
            rhs[0][0] -= gl[0] * a_lo;
            rhs[m - 1][0] -= gu[0] * a_up;
            match p.bc_h {
                BcKind::Dirichlet => {
                    rhs[0][1] -= gl[1] * a_lo;
                    rhs[m - 1][1] -= gu[1] * a_up;
                }
                BcKind::Neumann => {
                    sys.diag[0][1][1] -= a_lo * w0[1] / w0[0];
                    sys.upper[0][1][1] -= a_lo * w0[2] / w0[0];
                    rhs[0][1] -= gl[1] * (a_lo / w0[0]);
                    sys.diag[m - 1][1][1] -= a_up * w1[1] / w1[2];
                    sys.lower[m - 1][1][1] -= a_up * w1[0] / w1[2];
                    rhs[m - 1][1] -= gu[1] * (a_up / w1[2]);
                }
            }
            sys.solve(&mut rhs)?;
            v[1..=m].copy_from_slice(&rhs);
            v[0][0] = gl[0];
            v[last][0] = gu[0];
            match p.bc_h {
                BcKind::Dirichlet => {
                    v[0][1] = gl[1];
                    v[last][1] = gu[1];
                }
                BcKind::Neumann => {
                    v[0][1] = (gl[1] - v[1][1] * w0[1] - v[2][1] * w0[2]) / w0[0];
                    v[last][1] = (gu[1] - v[last - 2][1] * w1[0] - v[last - 1][1] * w1[1]) / w1[2];
                }
            }
            if k == 0 || kk == 0.0 {
                for x in v.iter_mut() {
                    x[0].im = 0.0;
                    x[1].im = 0.0;
                }
            }
            if !(v[m / 2][0].re.is_finite() && v[m / 2][1].re.is_finite()) {
                return Err(Error::NonFinite(format!("tangential march, mode {k}, t={tn}")));
            }
            Ok(())
        })?;
        if let Some(h) = hook.as_deref_mut() {
            let (u, hh) = snapshot(&state, tn);
            h(step + 1, &u, &hh);
        }
        if lattice.is_snapshot(step + 1) {
            out.push(snapshot(&state, tn));
        }
    }
    Ok(out)
}

/// Modal wall data of the scenario at time `t`.
pub fn scenario_wall_data(s: &Scenario, grid: &ChannelGrid, eps: f64, t: f64) -> TangentialWallData {
    let xs = grid.x_nodes();
    let nm = grid.nmodes();
    let mut out: TangentialWallData = [Vec::new(), Vec::new()];
    for wall in Wall::BOTH {
        let al = line_modes(&xs.iter().map(|&x| s.alpha2_at(wall, t, x)).collect::<Vec<_>>());
        let gm = match s.bc_mode {
            BcMode::Dirichlet => line_modes(&xs.iter().map(|&x| s.gamma2_at(wall, t, x, eps)).collect::<Vec<_>>()),
            BcMode::Conducting => vec![ZERO; nm],
        };
        out[wall.index()] = (0..nm).map(|k| [al[k], gm[k]]).collect();
    }
    out
}

/// Options of [`solve_viscous`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ViscousOptions {
    /// Compatibility order required before solving.
    pub order: u8,
    /// Record `‖u2‖² + ‖h2‖²` after every step.
    pub energy_audit: bool,
}

/// Full viscous solve of a scenario.
pub fn solve_viscous(s: &Scenario, epsilon: f64, num: &Numerics, opts: ViscousOptions) -> Result<(ViscousRun, Vec<f64>)> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive (got {epsilon})")));
    }
    let report = check_compatibility(s, opts.order, epsilon);
    if !report.passed() {
        let msg: Vec<String> =
            report.failures().iter().map(|r| format!("{} at {} wall: {:e}", r.condition, r.wall, r.residual)).collect();
        return Err(Error::Compatibility(msg.join("; ")));
    }
    let grid = num.channel_grid(s.length)?;
    let lattice = TimeLattice::new(s.horizon, num.dt, num.cadence)?;
    let mut warnings = Vec::new();
    if !grid.resolves_layer(epsilon) {
        let msg = format!(
            "mesh under-resolves the layer at eps={epsilon:e}: {} nodes within sqrt(eps) of the lower wall",
            grid.nodes_within(epsilon.sqrt(), Wall::Lower)
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let a0 = Profile1D::sample(&grid, 0.0, |z| (s.a)(z));
    let c0 = Profile1D::sample(&grid, 0.0, |z| (s.c)(z));
    let al0 = |t: f64| (s.alpha1[0])(t);
    let al1 = |t: f64| (s.alpha1[1])(t);
    let f1 = |t: f64, z: f64| (s.f1)(t, z);
    let u1 = solve_axial(epsilon, &a0, [(BcKind::Dirichlet, &al0), (BcKind::Dirichlet, &al1)], Some(&f1), &grid, &lattice)?;
    let zero = |_: f64| 0.0;
    let g0 = |t: f64| s.gamma1_at(Wall::Lower, t, epsilon);
    let g1 = |t: f64| s.gamma1_at(Wall::Upper, t, epsilon);
    let (bc_h, hw): (BcKind, [&(dyn Fn(f64) -> f64 + Sync); 2]) = match s.bc_mode {
        BcMode::Conducting => (BcKind::Neumann, [&zero, &zero]),
        BcMode::Dirichlet => (BcKind::Dirichlet, [&g0, &g1]),
    };
    let h1 = solve_axial(epsilon, &c0, [(bc_h, hw[0]), (bc_h, hw[1])], None, &grid, &lattice)?;
    let u2_0 = to_modal(&PhysicalField::sample(&grid, |x, z| (s.b)(x, z)), &grid)?;
    let h2_0 = to_modal(&PhysicalField::sample(&grid, |x, z| (s.d)(x, z)), &grid)?;
    let walls = |t: f64| Ok(scenario_wall_data(s, &grid, epsilon, t));
    let f2src = |t: f64| -> Result<(ModalField, ModalField)> {
        let f = to_modal(&PhysicalField::sample(&grid, |x, z| s.f2_at(t, x, z)), &grid)?;
        Ok((f, ModalField::zeros_like(&grid)))
    };
    let prob = TangentialProblem {
        epsilon,
        bc_h,
        u2_0,
        h2_0,
        walls: &walls,
        sources: if s.has_f2() { Some(&f2src) } else { None },
    };
    let mut energy = Vec::new();
    let tang = if opts.energy_audit {
        energy.push(modal_energy(&prob.u2_0, &grid) + modal_energy(&prob.h2_0, &grid));
        let mut hook = |_: usize, u: &ModalField, h: &ModalField| {
            energy.push(modal_energy(u, &grid) + modal_energy(h, &grid));
        };
        solve_tangential_viscous(&prob, &u1, &h1, &grid, &lattice, Some(&mut hook))?
    } else {
        solve_tangential_viscous(&prob, &u1, &h1, &grid, &lattice, None)?
    };
    let states = lattice
        .snapshot_steps()
        .into_iter()
        .zip(tang)
        .map(|(st, (u2, h2))| ViscousState {
            time: lattice.time(st),
            u1: u1[st].clone(),
            h1: h1[st].clone(),
            u2,
            h2,
        })
        .collect();
    Ok((ViscousRun { epsilon, bc_mode: s.bc_mode, lattice, states, warnings }, energy))
}

/// Discrete `‖v‖²` with the trapezoid weights and Parseval multiplicities.
pub fn modal_energy(v: &ModalField, grid: &ChannelGrid) -> f64 {
    let w = grid.weights();
    let mut acc = 0.0;
    for k in 0..v.nmodes() {
        let mult = grid.mode_multiplicity(k);
        for (j, &wj) in w.iter().enumerate() {
            acc += mult * wj * v.get(k, j).norm_sqr();
        }
    }
    acc * grid.length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn default_scenarios_are_compatible() {
        for s in [Scenario::default_conducting(), Scenario::default_dirichlet()] {
            for eps in [1e-2, 1e-4] {
                let r = check_compatibility(&s, 1, eps);
                assert!(r.passed(), "{:?}", r.failures());
            }
        }
    }

    #[test]
    fn shifted_wall_value_is_flagged() {
        let mut s = Scenario::default_conducting();
        let a0 = (s.a)(0.0);
        s.alpha1[0] = std::sync::Arc::new(move |_| a0 + 1.0);
        let r = check_compatibility(&s, 0, 1e-2);
        let row = r.rows.iter().find(|r| r.condition.starts_with("alpha1") && r.wall == "lower").unwrap();
        assert!(!row.pass && (row.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axial_eigenmode_decays() {
        let grid = ChannelGrid::new(4, 2049, 0.995, 2.0 * PI).unwrap();
        let lat = TimeLattice::new(0.1, 1e-3, 0.1).unwrap();
        let init = Profile1D::sample(&grid, 0.0, |z| (PI * z).sin());
        let zero = |_: f64| 0.0;
        let s = solve_axial(1.0, &init, [(BcKind::Dirichlet, &zero), (BcKind::Dirichlet, &zero)], None, &grid, &lat)
            .unwrap();
        let last = s.last().unwrap();
        let err = grid
            .z()
            .iter()
            .zip(&last.values)
            .map(|(&z, &v)| (v - (-PI * PI * 0.1).exp() * (PI * z).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5, "eigenmode error {err:e}");
    }

    #[test]
    fn constant_is_steady_under_neumann() {
        let grid = ChannelGrid::new(4, 257, 0.9, 2.0 * PI).unwrap();
        let lat = TimeLattice::new(0.1, 1e-3, 0.1).unwrap();
        let init = Profile1D::sample(&grid, 0.0, |_| 1.0);
        let zero = |_: f64| 0.0;
        let s = solve_axial(0.3, &init, [(BcKind::Neumann, &zero), (BcKind::Neumann, &zero)], None, &grid, &lat).unwrap();
        let e = s.iter().flat_map(|p| p.values.iter()).map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(e < 1e-12, "drift {e:e}");
    }
}
