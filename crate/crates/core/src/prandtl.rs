//! Boundary-layer correctors on the truncated half-line `Z ∈ [0, z_max]`.
//!
//! The axial correctors obey the heat equation. The tangential pair obeys,
//! per Fourier mode, a 2×2 parabolic system with coefficients that depend
//! on `(t, Z)` only. Both are marched with Crank–Nicolson, the coupling
//! held inside the implicit operator.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::interp::{decay_violated, decay_violated_complex};
use crate::fields::{line_modes, BlGrid, ChannelGrid, Wall};
use crate::ideal::{IdealOuter, WallTrace};
use crate::linalg::{solve_tridiagonal, BlockTridiagonal, Pair};
use crate::scenario::{BcMode, Scenario, TimeLattice};

const COMPAT_TOL: f64 = 1e-10;
const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Wall condition of one corrector component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Options for [`solve_heat_halfline`].
#[derive(Debug, Clone, Default)]
pub struct HeatOptions {
    /// Start from this profile instead of zero.
    pub initial: Option<Vec<f64>>,
    /// Initial time.
    pub t0: f64,
    /// Skip the `g(t0) = 0` check (oracle runs with step data).
    pub allow_incompatible: bool,
}

/// Crank–Nicolson march of `∂t v = ∂ZZ v` with wall data `g(t)` (value or
/// slope) and `v(z_max) = 0`. Returns the profile at every step.
pub fn solve_heat_halfline(
    bc: BcKind,
    g: impl Fn(f64) -> f64,
    grid: &BlGrid,
    dt: f64,
    steps: usize,
    opts: &HeatOptions,
) -> Result<Vec<Vec<f64>>> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive (got {dt})")));
    }
    let n = grid.len();
    let h = grid.spacing();
    let g0 = g(opts.t0);
    if !opts.allow_incompatible && opts.initial.is_none() && g0.abs() > COMPAT_TOL {
        return Err(Error::Compatibility(format!("wall data at t=0 is {g0:e}, expected 0")));
    }
    let mut v = match &opts.initial {
        Some(p) if p.len() == n => p.clone(),
        Some(p) => return Err(Error::Dimension(format!("initial profile {} vs grid {n}", p.len()))),
        None => vec![0.0; n],
    };
    let r = dt / (2.0 * h * h);
    let m = n - 2;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(v.clone());
    let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for step in 0..steps {
        let t_new = opts.t0 + (step + 1) as f64 * dt;
        let g_new = g(t_new);
        for i in 1..=m {
            rhs[i - 1] = v[i] + r * (v[i - 1] - 2.0 * v[i] + v[i + 1]);
            lo[i - 1] = -r;
            di[i - 1] = 1.0 + 2.0 * r;
            up[i - 1] = -r;
        }
        match bc {
            BcKind::Dirichlet => rhs[0] += r * g_new,
            BcKind::Neumann => {
                di[0] -= r * 4.0 / 3.0;
                up[0] += r / 3.0;
                rhs[0] -= r * 2.0 * h * g_new / 3.0;
            }
        }
        solve_tridiagonal(&lo, &di, &up, &mut rhs)?;
        v[1..=m].copy_from_slice(&rhs);
        v[n - 1] = 0.0;
        v[0] = match bc {
            BcKind::Dirichlet => g_new,
            BcKind::Neumann => (4.0 * v[1] - v[2] - 2.0 * h * g_new) / 3.0,
        };
        if !v[0].is_finite() || !v[m / 2].is_finite() {
            return Err(Error::NonFinite(format!("heat march at t={t_new}")));
        }
        out.push(v.clone());
    }
    Ok(out)
}

/// Crank–Nicolson stepper for one mode of the tangential pair
/// `∂t v − ∂ZZ v + i k̃ [[a, −b], [−b, a]] v = S`.
///
/// Component 0 (velocity) always has a Dirichlet wall; component 1
/// (magnetic) is Dirichlet or Neumann.
#[derive(Debug, Clone)]
pub struct PairStepper {
    pub state: Vec<Pair>,
    kk: f64,
    h: f64,
    bc_h: BcKind,
}

impl PairStepper {
    pub fn new(n: usize, h: f64, kk: f64, bc_h: BcKind) -> Self {
        Self { state: vec![[ZERO; 2]; n], kk, h, bc_h }
    }

    /// Advance by `dt`. `a`, `b` and `source` are half-step values; `wall`
    /// holds the new wall value of component 0 and the new value or slope of component 1.
    pub fn advance(&mut self, dt: f64, a: &[f64], b: &[f64], source: Option<&[Pair]>, wall: Pair) -> Result<()> {
        let n = self.state.len();
        let m = n - 2;
        let h = self.h;
        let r = dt / (2.0 * h * h);
        let v = &self.state;
        let mut sys = BlockTridiagonal::zeros(m);
        let mut rhs = vec![[ZERO; 2]; m];
        let half = 0.5 * dt;
        for i in 1..=m {
            let ik = I * self.kk;
            let (ai, bi) = (ik * a[i], ik * b[i]);
            // M v = −i k̃ [[a, −b], [−b, a]] v
            let mv = [-(ai * v[i][0]) + bi * v[i][1], bi * v[i][0] - ai * v[i][1]];
            let mut row = [ZERO; 2];
            for c in 0..2 {
                let lap = (v[i - 1][c] - v[i][c] * 2.0 + v[i + 1][c]) * r;
                row[c] = v[i][c] + lap + mv[c] * half;
                if let Some(s) = source {
                    row[c] += s[i][c] * dt;
                }
            }
            rhs[i - 1] = row;
            let d = Complex64::new(1.0 + 2.0 * r, 0.0);
            sys.diag[i - 1] = [[d + ai * half, -(bi * half)], [-(bi * half), d + ai * half]];
            sys.lower[i - 1] = [[Complex64::new(-r, 0.0), ZERO], [ZERO, Complex64::new(-r, 0.0)]];
            sys.upper[i - 1] = [[Complex64::new(-r, 0.0), ZERO], [ZERO, Complex64::new(-r, 0.0)]];
        }
        rhs[0][0] += wall[0] * r;
        match self.bc_h {
            BcKind::Dirichlet => rhs[0][1] += wall[1] * r,
            BcKind::Neumann => {
                sys.diag[0][1][1] -= r * 4.0 / 3.0;
                sys.upper[0][1][1] += r / 3.0;
                rhs[0][1] -= wall[1] * (r * 2.0 * h / 3.0);
            }
        }
        sys.solve(&mut rhs)?;
        let st = &mut self.state;
        st[1..=m].copy_from_slice(&rhs);
        st[n - 1] = [ZERO; 2];
        st[0][0] = wall[0];
        st[0][1] = match self.bc_h {
            BcKind::Dirichlet => wall[1],
            BcKind::Neumann => (st[1][1] * 4.0 - st[2][1] - wall[1] * (2.0 * h)) / 3.0,
        };
        if !(st[1][0].re.is_finite() && st[1][1].re.is_finite()) {
            return Err(Error::NonFinite("tangential corrector march".into()));
        }
        Ok(())
    }
}

/// Complex mode-by-node samples on the half-line grid: `data[k * n + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlModal {
    pub nmodes: usize,
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl BlModal {
    pub fn zeros(nmodes: usize, n: usize) -> Self {
        Self { nmodes, n, data: vec![ZERO; nmodes * n] }
    }

    pub fn get(&self, k: usize, i: usize) -> Complex64 {
        self.data[k * self.n + i]
    }

    pub fn mode(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn mode_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

/// Correctors attached to one wall.
#[derive(Debug, Clone)]
pub struct WallCorrectors {
    pub wall: Wall,
    pub bc_theta: BcKind,
    pub bc_h: BcKind,
    /// Axial correctors at every time step.
    pub theta1: Vec<Vec<f64>>,
    pub h1: Vec<Vec<f64>>,
    /// Tangential correctors at the recorded steps.
    pub theta2: Vec<BlModal>,
    pub h2: Vec<BlModal>,
    /// First-order tangential correctors (present for order-1 solves).
    pub theta2_1: Option<Vec<BlModal>>,
    pub h2_1: Option<Vec<BlModal>>,
    /// Outer traces at every integer step.
    pub traces: Vec<WallTrace>,
    /// Axial mismatch data at every step: `(θ1 wall value, h1 wall value or slope)`.
    pub mismatch1: Vec<[f64; 2]>,
    /// Far-field decay violations found at recorded steps.
    pub decay_warnings: Vec<String>,
}

/// Lower and upper correctors on a shared lattice.
#[derive(Debug, Clone)]
pub struct CorrectorSet {
    pub bl: BlGrid,
    pub lattice: TimeLattice,
    pub epsilon: f64,
    pub bc_mode: BcMode,
    pub order: u8,
    pub nmodes: usize,
    /// Steps at which the tangential correctors were stored.
    pub record_steps: Vec<usize>,
    pub walls: [WallCorrectors; 2],
}

impl CorrectorSet {
    pub fn wall(&self, w: Wall) -> &WallCorrectors {
        &self.walls[w.index()]
    }

    /// Position of `step` among the recorded steps.
    pub fn record_index(&self, step: usize) -> Option<usize> {
        self.record_steps.binary_search(&step).ok()
    }

    pub fn decay_warnings(&self) -> Vec<String> {
        self.walls.iter().flat_map(|w| w.decay_warnings.iter().cloned()).collect()
    }
}

/// Requested corrector solve.
#[derive(Debug, Clone)]
pub struct CorrectorRequest {
    pub epsilon: f64,
    pub bc_mode: BcMode,
    pub order: u8,
    pub record_steps: Vec<usize>,
}

/// Snapshot steps plus their neighbours (centered time differences inside,
/// one-sided three-point at the ends).
pub fn record_steps_with_neighbours(lattice: &TimeLattice) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::new();
    for st in lattice.snapshot_steps() {
        let lo = if st + 2 > lattice.steps { 2 } else { 1 };
        let hi = if st < 2 { 2 } else { 1 };
        for q in st.saturating_sub(lo)..=(st + hi).min(lattice.steps) {
            s.push(q);
        }
    }
    s.sort_unstable();
    s.dedup();
    s
}

/// The identically-zero first-order axial correctors.
pub fn first_order_trivial_components(bl: &BlGrid) -> (Vec<f64>, Vec<f64>) {
    (vec![0.0; bl.len()], vec![0.0; bl.len()])
}

fn modal_line(grid: &ChannelGrid, f: impl Fn(f64) -> f64) -> Result<Vec<Complex64>> {
    Ok(line_modes(&grid.x_nodes().into_iter().map(f).collect::<Vec<_>>()))
}

/// Solve every corrector for one wall.
fn solve_wall(
    scenario: &Scenario,
    outer: &IdealOuter<'_>,
    bl: &BlGrid,
    lattice: &TimeLattice,
    req: &CorrectorRequest,
    wall: Wall,
) -> Result<WallCorrectors> {
    let grid = outer.grid();
    let eps = req.epsilon;
    let dt = lattice.dt;
    let steps = lattice.steps;
    let zi = wall.coordinate();
    let ci = (scenario.c)(zi);

    // Outer traces at integer and half steps: index 2n is t_n, 2n+1 is t_{n+1/2}.
    let traces: Vec<WallTrace> = (0..=2 * steps)
        .into_par_iter()
        .map(|q| outer.wall_trace(q as f64 * dt / 2.0, wall))
        .collect::<Result<Vec<_>>>()?;

    let bc_h = match req.bc_mode {
        BcMode::Conducting => BcKind::Neumann,
        BcMode::Dirichlet => BcKind::Dirichlet,
    };

    let g_theta = |t: f64| -> f64 {
        let q = (t / dt * 2.0).round() as usize;
        scenario.alpha1_at(wall, t) - traces[q].u1
    };
    let g_h = |t: f64| -> f64 {
        match bc_h {
            BcKind::Neumann => 0.0,
            BcKind::Dirichlet => scenario.gamma1_at(wall, t, eps) - ci,
        }
    };
    let opts = HeatOptions::default();
    let theta1 = solve_heat_halfline(BcKind::Dirichlet, g_theta, bl, dt, steps, &opts)
        .map_err(|e| Error::Compatibility(format!("{} wall θ1: {e}", wall.name())))?;
    let h1 = solve_heat_halfline(bc_h, g_h, bl, dt, steps, &opts)
        .map_err(|e| Error::Compatibility(format!("{} wall h1: {e}", wall.name())))?;
    let mismatch1: Vec<[f64; 2]> = (0..=steps).map(|s| [theta1[s][0], g_h(lattice.time(s))]).collect();

    // Tangential mismatch per integer step and mode.
    let nm = grid.nmodes();
    let wall_data: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..=steps)
        .into_par_iter()
        .map(|s| {
            let t = lattice.time(s);
            let tr = &traces[2 * s];
            let alpha = modal_line(grid, |x| scenario.alpha2_at(wall, t, x))?;
            let th: Vec<Complex64> = (0..nm).map(|k| alpha[k] - tr.u2[k]).collect();
            let hh: Vec<Complex64> = match bc_h {
                BcKind::Neumann => vec![ZERO; nm],
                BcKind::Dirichlet => {
                    let gamma = modal_line(grid, |x| scenario.gamma2_at(wall, t, x, eps))?;
                    (0..nm).map(|k| gamma[k] - tr.h2[k]).collect()
                }
            };
            Ok((th, hh))
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 0..nm {
        let (a, b) = (wall_data[0].0[k], wall_data[0].1[k]);
        if a.norm() > COMPAT_TOL || b.norm() > COMPAT_TOL {
            return Err(Error::Compatibility(format!(
                "{} wall tangential mismatch at t=0, mode {k}: ({:e}, {:e})",
                wall.name(),
                a.norm(),
                b.norm()
            )));
        }
    }

    let n = bl.len();
    let h = bl.spacing();
    let zs = bl.nodes();
    let side = if wall == Wall::Lower { 1.0 } else { -1.0 };
    let order1 = req.order >= 1;
    let rec = &req.record_steps;

    // March each mode: order 0 and, when asked, order 1 in lock step.
    type ModeOut = (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>);
    let per_mode: Vec<ModeOut> = (0..nm)
        .into_par_iter()
        .map(|k| -> Result<ModeOut> {
            let kk = grid.derivative_wavenumber(k);
            let ik = I * kk;
            let mut s0 = PairStepper::new(n, h, kk, bc_h);
            let mut s1 = PairStepper::new(n, h, kk, bc_h);
            let mut out: ModeOut = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            let record = |step: usize, s0: &PairStepper, s1: &PairStepper, out: &mut ModeOut| {
                if rec.binary_search(&step).is_ok() {
                    out.0.push(s0.state.iter().map(|p| p[0]).collect());
                    out.1.push(s0.state.iter().map(|p| p[1]).collect());
                    if order1 {
                        out.2.push(s1.state.iter().map(|p| p[0]).collect());
                        out.3.push(s1.state.iter().map(|p| p[1]).collect());
                    }
                }
            };
            record(0, &s0, &s1, &mut out);
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            let mut src = vec![[ZERO; 2]; n];
            for step in 0..steps {
                let tr = &traces[2 * step + 1];
                for i in 0..n {
                    let th1 = 0.5 * (theta1[step][i] + theta1[step + 1][i]);
                    let hh1 = 0.5 * (h1[step][i] + h1[step + 1][i]);
                    a[i] = tr.u1 + th1;
                    b[i] = tr.h1 + hh1;
                    src[i] = [
                        -(ik * tr.u2[k]) * th1 + ik * tr.h2[k] * hh1,
                        -(ik * tr.h2[k]) * th1 + ik * tr.u2[k] * hh1,
                    ];
                }
                let old = if order1 { s0.state.clone() } else { Vec::new() };
                let wd = &wall_data[step + 1];
                s0.advance(dt, &a, &b, Some(&src), [wd.0[k], wd.1[k]])?;
                if order1 {
                    for i in 0..n {
                        let th1 = 0.5 * (theta1[step][i] + theta1[step + 1][i]);
                        let hh1 = 0.5 * (h1[step][i] + h1[step + 1][i]);
                        let t0 = 0.5 * (old[i][0] + s0.state[i][0]);
                        let h0 = 0.5 * (old[i][1] + s0.state[i][1]);
                        let w = -side * zs[i];
                        src[i] = [
                            ik * (th1 * tr.dz_u2[k] + t0 * tr.dz_u1 - hh1 * tr.dz_h2[k] - h0 * tr.dz_h1) * w,
                            ik * (th1 * tr.dz_h2[k] + h0 * tr.dz_u1 - hh1 * tr.dz_u2[k] - t0 * tr.dz_h1) * w,
                        ];
                    }
                    s1.advance(dt, &a, &b, Some(&src), [ZERO, ZERO])?;
                }
                record(step + 1, &s0, &s1, &mut out);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let nrec = rec.len();
    let gather = |sel: fn(&ModeOut) -> &Vec<Vec<Complex64>>| -> Vec<BlModal> {
        (0..nrec)
            .map(|r| {
                let mut m = BlModal::zeros(nm, n);
                for (k, mo) in per_mode.iter().enumerate() {
                    m.mode_mut(k).copy_from_slice(&sel(mo)[r]);
                }
                m
            })
            .collect()
    };
    let theta2 = gather(|m| &m.0);
    let h2 = gather(|m| &m.1);
    let (theta2_1, h2_1) = if order1 { (Some(gather(|m| &m.2)), Some(gather(|m| &m.3))) } else { (None, None) };

    let mut decay_warnings = Vec::new();
    for (r, &step) in rec.iter().enumerate() {
        let t = lattice.time(step);
        let mut check = |name: &str, bad: bool| {
            if bad {
                decay_warnings.push(format!("{} wall {name} not decayed at z_max (t={t:.3})", wall.name()));
            }
        };
        check("theta1", decay_violated(&theta1[step]));
        check("h1", decay_violated(&h1[step]));
        for k in 0..nm {
            check("theta2", decay_violated_complex(theta2[r].mode(k)));
            check("h2", decay_violated_complex(h2[r].mode(k)));
        }
    }
    decay_warnings.dedup();

    let int_traces = traces.into_iter().step_by(2).collect();
    Ok(WallCorrectors {
        wall,
        bc_theta: BcKind::Dirichlet,
        bc_h,
        theta1,
        h1,
        theta2,
        h2,
        theta2_1,
        h2_1,
        traces: int_traces,
        mismatch1,
        decay_warnings,
    })
}

/// Solve the lower and upper corrector systems for one `ε` and wall mode.
pub fn solve_correctors(
    scenario: &Scenario,
    outer: &IdealOuter<'_>,
    bl: &BlGrid,
    lattice: &TimeLattice,
    req: &CorrectorRequest,
) -> Result<CorrectorSet> {
    if !(req.epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive (got {})", req.epsilon)));
    }
    if req.order > 1 {
        return Err(Error::Config(format!("expansion order must be 0 or 1 (got {})", req.order)));
    }
    if req.record_steps.windows(2).any(|w| w[1] <= w[0]) || req.record_steps.last().is_some_and(|&s| s > lattice.steps)
    {
        return Err(Error::Config("record steps must be increasing and within the horizon".into()));
    }
    let lower = solve_wall(scenario, outer, bl, lattice, req, Wall::Lower)?;
    let upper = solve_wall(scenario, outer, bl, lattice, req, Wall::Upper)?;
    for w in [&lower, &upper] {
        for msg in &w.decay_warnings {
            log::warn!("{msg}");
        }
    }
    Ok(CorrectorSet {
        bl: bl.clone(),
        lattice: lattice.clone(),
        epsilon: req.epsilon,
        bc_mode: req.bc_mode,
        order: req.order,
        nmodes: outer.grid().nmodes(),
        record_steps: req.record_steps.clone(),
        walls: [lower, upper],
    })
}

/// Weighted decay functionals of one profile: `(sup ⟨Z⟩^l |v|, ‖⟨Z⟩^l ∂Z v‖_{L²})`.
pub fn weighted_decay_report(values: &[Complex64], bl: &BlGrid, l: u32) -> Result<(f64, f64)> {
    if l > 2 {
        return Err(Error::Precondition(format!("weight power must be 0, 1 or 2 (got {l})")));
    }
    let n = values.len();
    if n != bl.len() {
        return Err(Error::Dimension(format!("{n} values on a {}-node half-line grid", bl.len())));
    }
    let h = bl.spacing();
    let weight = |i: usize| (1.0 + bl.node(i).powi(2)).sqrt().powi(l as i32);
    let sup = (0..n).map(|i| weight(i) * values[i].norm()).fold(0.0, f64::max);
    let mut acc = 0.0;
    for i in 0..n {
        let d = if i == 0 {
            (values[0] * -3.0 + values[1] * 4.0 - values[2]) / (2.0 * h)
        } else if i == n - 1 {
            (values[n - 3] - values[n - 2] * 4.0 + values[n - 1] * 3.0) / (2.0 * h)
        } else {
            (values[i + 1] - values[i - 1]) / (2.0 * h)
        };
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        acc += w * (weight(i) * d.norm()).powi(2);
    }
    Ok((sup, acc.sqrt()))
}

/// Real-profile convenience wrapper of [`weighted_decay_report`].
pub fn weighted_decay_report_real(values: &[f64], bl: &BlGrid, l: u32) -> Result<(f64, f64)> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    weighted_decay_report(&c, bl, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> BlGrid {
        BlGrid::default()
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = grid();
        for bc in [BcKind::Dirichlet, BcKind::Neumann] {
            let s = solve_heat_halfline(bc, |_| 0.0, &g, 1e-3, 50, &HeatOptions::default()).unwrap();
            assert!(s.iter().all(|p| p.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn incompatible_wall_data_is_rejected() {
        let g = grid();
        let r = solve_heat_halfline(BcKind::Dirichlet, |_| 1.0, &g, 1e-3, 5, &HeatOptions::default());
        assert!(matches!(r, Err(Error::Compatibility(_))));
    }

    #[test]
    fn neumann_wall_slope_is_exact() {
        let g = grid();
        let s = solve_heat_halfline(BcKind::Neumann, |t| t.sin(), &g, 1e-3, 200, &HeatOptions::default()).unwrap();
        let h = g.spacing();
        for (n, p) in s.iter().enumerate().skip(1) {
            let slope = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
            assert!((slope - (n as f64 * 1e-3).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mismatch_pair_stays_zero() {
        let g = grid();
        let mut st = PairStepper::new(g.len(), g.spacing(), 2.0, BcKind::Neumann);
        let a = vec![1.0; g.len()];
        let b = vec![0.5; g.len()];
        for _ in 0..20 {
            st.advance(1e-3, &a, &b, None, [ZERO, ZERO]).unwrap();
        }
        assert!(st.state.iter().all(|p| p[0].norm() == 0.0 && p[1].norm() == 0.0));
    }

    #[test]
    fn weighted_report_of_zero() {
        let g = grid();
        assert_eq!(weighted_decay_report_real(&vec![0.0; g.len()], &g, 2).unwrap(), (0.0, 0.0));
        assert!(weighted_decay_report_real(&vec![0.0; g.len()], &g, 3).is_err());
    }

    #[test]
    fn record_steps_include_neighbours() {
        let l = TimeLattice::new(0.2, 0.01, 0.1).unwrap();
        assert_eq!(record_steps_with_neighbours(&l), vec![0, 1, 2, 9, 10, 11, 18, 19, 20]);
    }

    #[test]
    fn step_data_matches_erfc_similarity() {
        let g = grid();
        let t0: f64 = 1e-6;
        let init: Vec<f64> = g.nodes().iter().map(|&z| libm::erfc(z / (2.0 * t0.sqrt()))).collect();
        let opts = HeatOptions { initial: Some(init), t0, allow_incompatible: true };
        let steps = 1000;
        let dt = (1.0 - t0) / steps as f64;
        let s = solve_heat_halfline(BcKind::Dirichlet, |_| 1.0, &g, dt, steps, &opts).unwrap();
        let err = g
            .nodes()
            .iter()
            .zip(&s[steps])
            .map(|(&z, &v)| (v - libm::erfc(z / 2.0)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 2e-4, "erfc error {err:e}");
    }

    #[test]
    fn mean_mode_reduces_to_heat() {
        let g = grid();
        let dt = 1e-3;
        let gt = |t: f64| (1.0 - (-t).exp()) * 0.7;
        let gh = |t: f64| t.sin() * 0.3;
        let a = vec![1.3; g.len()];
        let b = vec![0.4; g.len()];
        let mut st = PairStepper::new(g.len(), g.spacing(), 0.0, BcKind::Neumann);
        for n in 0..300 {
            let t = (n + 1) as f64 * dt;
            st.advance(dt, &a, &b, None, [Complex64::new(gt(t), 0.0), Complex64::new(gh(t), 0.0)]).unwrap();
        }
        let opts = HeatOptions::default();
        let th = solve_heat_halfline(BcKind::Dirichlet, gt, &g, dt, 300, &opts).unwrap();
        let hh = solve_heat_halfline(BcKind::Neumann, gh, &g, dt, 300, &opts).unwrap();
        for i in 0..g.len() {
            assert!((st.state[i][0] - th[300][i]).norm() < 1e-10);
            assert!((st.state[i][1] - hh[300][i]).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_advection_is_a_phase_factor() {
        let g = grid();
        let (dt, steps, kk, u) = (1e-3, 1000, 1.0, 2.0);
        let gm = |t: f64| t * (-t).exp();
        let a = vec![u; g.len()];
        let b = vec![0.0; g.len()];
        let mut st = PairStepper::new(g.len(), g.spacing(), kk, BcKind::Neumann);
        for n in 0..steps {
            let t = (n + 1) as f64 * dt;
            let w = Complex64::from_polar(gm(t), -kk * u * t);
            st.advance(dt, &a, &b, None, [w, ZERO]).unwrap();
        }
        let heat = solve_heat_halfline(BcKind::Dirichlet, gm, &g, dt, steps, &HeatOptions::default()).unwrap();
        let ph = Complex64::from_polar(1.0, -kk * u * 1.0);
        let err = (0..g.len()).map(|i| (st.state[i][0] - ph * heat[steps][i]).norm()).fold(0.0, f64::max);
        assert!(err <= 2e-4, "phase error {err:e}");
        assert!(st.state.iter().all(|p| p[1].norm() == 0.0));
    }

    #[test]
    fn weighted_sup_matches_dense_sampling() {
        let g = grid();
        let v: Vec<f64> = g.nodes().iter().map(|z| (-z).exp()).collect();
        let (sup, _) = weighted_decay_report_real(&v, &g, 2).unwrap();
        let dense = (0..=120_000).map(|i| i as f64 * 1e-4).map(|z| (1.0 + z * z) * (-z).exp()).fold(0.0, f64::max);
        assert!((sup - dense).abs() <= 1e-3);
        let e: Vec<f64> = g.nodes().iter().map(|&z| libm::erfc(z / 2.0)).collect();
        let (s, d) = weighted_decay_report_real(&e, &g, 2).unwrap();
        assert!(s.is_finite() && d.is_finite());
        assert!(!decay_violated(&e));
    }

    #[test]
    fn first_order_axial_components_vanish() {
        let (t, h) = first_order_trivial_components(&grid());
        assert!(t.iter().chain(&h).all(|&v| v == 0.0));
    }
}
