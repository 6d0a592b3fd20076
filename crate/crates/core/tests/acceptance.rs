//! Acceptance criteria of the lab, one line per criterion.
//!
//! Runs as a plain binary: every criterion is evaluated, a PASS/FAIL line is
//! printed for each, and the process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use mhd_bl::composer::{eta_shape, psi, AssemblyTerms, Composer, CrossCheck};
use mhd_bl::fields::{ChannelGrid, NormKind, Profile1D};
use mhd_bl::ideal::IdealOuter;
use mhd_bl::lab::{sweep, Component, ConvergenceReport, RateReport, SweepFailure, Target, DEFAULT_EPSILONS};
use mhd_bl::prandtl::{record_steps_with_neighbours, solve_correctors, solve_heat_halfline, BcKind, CorrectorRequest, HeatOptions};
use mhd_bl::scenario::{BcMode, Numerics, Scenario, TimeLattice};
use mhd_bl::viscous::{solve_axial, solve_viscous, ViscousOptions};

mod common;

struct Line {
    ok: bool,
    detail: String,
}

impl Line {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self { ok, detail: detail.into() }
    }
}

fn and(lines: Vec<Line>) -> Line {
    let ok = lines.iter().all(|l| l.ok);
    let detail = lines.iter().map(|l| l.detail.as_str()).collect::<Vec<_>>().join("; ");
    Line::new(ok, detail)
}

fn slope(report: &RateReport, target: Target, component: Component, norm: NormKind) -> Line {
    match report.entry(target, component, norm) {
        Some(e) => {
            let (p, tol) = (e.theory.unwrap_or(f64::NAN), e.tolerance.unwrap_or(0.0));
            let ok = e.pass.unwrap_or(false);
            Line::new(
                ok,
                format!(
                    "{} {} {} slope {:.3} (want {p}±{tol}, r2 {:.4}){}",
                    target,
                    component,
                    norm.name(),
                    e.slope,
                    e.r2,
                    if ok { "" } else { " FAIL" }
                ),
            )
        }
        None => Line::new(false, format!("{target} {component} {} missing", norm.name())),
    }
}

fn check(report: &RateReport, name: &str) -> Line {
    match report.checks.iter().find(|c| c.name == name) {
        Some(c) => Line::new(c.pass, format!("{name}: {} ({})", if c.pass { "ok" } else { "FAIL" }, c.detail)),
        None => Line::new(false, format!("{name}: missing")),
    }
}

fn c1(r: &RateReport) -> Line {
    and([NormKind::L2, NormKind::H1, NormKind::Linf].map(|n| slope(r, Target::Approx0, Component::All, n)).into())
}

fn c2(r: &RateReport) -> Line {
    let mut v = Vec::new();
    for c in [Component::U1, Component::H1] {
        for n in [NormKind::L2, NormKind::H1, NormKind::Linf] {
            v.push(slope(r, Target::Approx0, c, n));
        }
    }
    and(v)
}

fn c3(r: &RateReport) -> Line {
    and(vec![slope(r, Target::Ideal, Component::All, NormKind::L2), check(r, "corrected L2 error below uncorrected")])
}

fn c5(r: &RateReport) -> Line {
    and(vec![
        slope(r, Target::Approx1, Component::All, NormKind::H1),
        slope(r, Target::Approx1, Component::All, NormKind::Linf),
        slope(r, Target::IdealBl, Component::All, NormKind::H1),
    ])
}

fn c6() -> Line {
    let bl = Numerics::default().bl_grid().unwrap();
    let t0: f64 = 1e-6;
    let init: Vec<f64> = bl.nodes().iter().map(|&z| libm::erfc(z / (2.0 * t0.sqrt()))).collect();
    let opts = HeatOptions { initial: Some(init), t0, allow_incompatible: true };
    let steps = 1000;
    let heat = solve_heat_halfline(BcKind::Dirichlet, |_| 1.0, &bl, (1.0 - t0) / steps as f64, steps, &opts).unwrap();
    let erfc_err =
        bl.nodes().iter().zip(&heat[steps]).map(|(&z, &v)| (v - libm::erfc(z / 2.0)).abs()).fold(0.0, f64::max);

    let grid = ChannelGrid::new(4, 2049, 0.995, 2.0 * PI).unwrap();
    let lat = TimeLattice::new(0.1, 1e-3, 0.1).unwrap();
    let zero = |_: f64| 0.0;
    let sine = Profile1D::sample(&grid, 0.0, |z| (PI * z).sin());
    let axial = solve_axial(1.0, &sine, [(BcKind::Dirichlet, &zero), (BcKind::Dirichlet, &zero)], None, &grid, &lat).unwrap();
    let eig_err = grid
        .z()
        .iter()
        .zip(&axial.last().unwrap().values)
        .map(|(&z, &v)| (v - (-PI * PI * 0.1).exp() * (PI * z).sin()).abs())
        .fold(0.0, f64::max);

    let e2 = common::manufactured_error(129, 0.01);
    let e3 = common::manufactured_error(257, 0.005);
    let ratio = e2 / e3;

    let s = Scenario::default_conducting();
    let g = Numerics::default().channel_grid(s.length).unwrap();
    let outer = IdealOuter::new(&s, &g).unwrap();
    let (p0, m0) = outer.elsasser_at(0.0).unwrap();
    let mut modulus: f64 = 0.0;
    for k in 1..=20 {
        let (p, m) = outer.elsasser_at(0.1 * k as f64).unwrap();
        for (a, b) in p.coeffs().iter().zip(p0.coeffs()).chain(m.coeffs().iter().zip(m0.coeffs())) {
            if b.norm() > 1e-300 {
                modulus = modulus.max((a.norm() - b.norm()).abs() / b.norm());
            }
        }
    }
    and(vec![
        Line::new(erfc_err <= 2e-4, format!("erfc {erfc_err:.2e} (<= 2e-4)")),
        Line::new(eig_err <= 1e-5, format!("eigenmode {eig_err:.2e} (<= 1e-5)")),
        Line::new((ratio - 4.0).abs() <= 0.5, format!("manufactured ratio {ratio:.3} (4±0.5)")),
        Line::new(modulus <= 1e-12, format!("Elsasser modulus {modulus:.2e} (<= 1e-12)")),
    ])
}

fn c7() -> Line {
    let mut zero_products = true;
    for i in 0..=10_000 {
        let z = i as f64 / 10_000.0;
        zero_products &= psi(z).unwrap()[0] * psi(1.0 - z).unwrap()[0] == 0.0;
    }
    let h = 1e-6;
    let eta_slope = (-eta_shape(2.0 * h)[0] + 4.0 * eta_shape(h)[0] - 3.0 * eta_shape(0.0)[0]) / (2.0 * h);

    // Assembled conducting approximant with a genuine outer wall slope.
    let mut s = Scenario::default_conducting();
    s.horizon = 0.5;
    s.c = Arc::new(|z| 1.0 + 0.5 * (PI * z).cos() + 0.1 * (z - 0.5).powi(3));
    let num = Numerics::default();
    let grid = num.channel_grid(s.length).unwrap();
    let lat = TimeLattice::new(s.horizon, num.dt, num.cadence).unwrap();
    let outer = IdealOuter::new(&s, &grid).unwrap();
    let req = CorrectorRequest { epsilon: 1e-3, bc_mode: BcMode::Conducting, order: 0, record_steps: lat.snapshot_steps() };
    let corr = solve_correctors(&s, &outer, &num.bl_grid().unwrap(), &lat, &req).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let with = comp.check_traces(&s, &comp.assemble(0, AssemblyTerms::full(BcMode::Conducting, 0)).unwrap()).unwrap();
    let without = comp.check_traces(&s, &comp.assemble(0, AssemblyTerms::COMPOSITE).unwrap()).unwrap();
    let rel = with.magnetic / with.slope_scale;

    let mut e = Scenario::zero(2.0 * PI, 0.5, BcMode::Dirichlet);
    e.a = Arc::new(|z| 2.0 + (PI * z).sin().powi(3));
    e.c = Arc::new(|z| 1.0 + 0.5 * (PI * z).cos());
    e.b = Arc::new(|x, z| x.sin() * (PI * z).sin().powi(3));
    e.d = Arc::new(|x, z| (2.0 * x).cos() * (PI * z).sin());
    e.alpha1 = [Arc::new(|_| 2.0), Arc::new(|_| 2.0)];
    e.gamma1 = [Arc::new(|_, _| 1.5), Arc::new(|_, _| 0.5)];
    let (_, energy) = solve_viscous(&e, 1e-3, &num, ViscousOptions { order: 0, energy_audit: true }).unwrap();
    let growth = energy.windows(2).filter(|w| w[1] - w[0] > 1e-10 * w[0].max(1.0)).count();

    and(vec![
        Line::new(zero_products, format!("psi(z)psi(1-z) = 0 on 10001 points: {zero_products}")),
        Line::new((eta_slope - 1.0).abs() <= 1e-8, format!("eta wall slope {eta_slope:.10} (1 within 1e-8)")),
        Line::new(
            rel <= 1e-3 && with.velocity < 1e-12,
            format!(
                "conducting wall slope {:.2e} = {rel:.1e} of max slope (<= 1e-3; {:.2e} without eta)",
                with.magnetic, without.magnetic
            ),
        ),
        Line::new(growth == 0, format!("energy audit: {growth} growing steps of {}", energy.len() - 1)),
    ])
}

fn cross(s: &Scenario, order: u8, num: &Numerics) -> CrossCheck {
    let grid = num.channel_grid(s.length).unwrap();
    let lat = TimeLattice::new(s.horizon, num.dt, num.cadence).unwrap();
    let outer = IdealOuter::new(s, &grid).unwrap();
    let req = CorrectorRequest { epsilon: 1e-3, bc_mode: s.bc_mode, order, record_steps: record_steps_with_neighbours(&lat) };
    let corr = solve_correctors(s, &outer, &num.bl_grid().unwrap(), &lat, &req).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let approx = comp.assemble(order, AssemblyTerms::full(s.bc_mode, order)).unwrap();
    comp.cross_check(s, &approx).unwrap()
}

/// Gaps at or below this level are round-off and are not expected to shrink.
const ROUND_OFF_GAP: f64 = 1e-8;

fn c8() -> Line {
    let coarse = Numerics::default();
    let fine = Numerics { nz: 4097, nzb: 1921, dt: 5e-4, ..Numerics::default() };
    let mut lines = Vec::new();
    for (s, order) in [(Scenario::default_conducting(), 0), (Scenario::default_dirichlet(), 1)] {
        let a = cross(&s, order, &coarse);
        let b = cross(&s, order, &fine);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let ratio = ra.corrected_gap / rb.corrected_gap;
            let converged = ra.corrected_gap <= ROUND_OFF_GAP;
            let ok = ra.corrected_gap <= 5e-2 && (converged || ratio >= 3.0);
            lines.push(Line::new(
                ok,
                format!(
                    "{} o{order} {}: gap {:.2e} (literal {:.2e}) -> {:.2e}, x{:.1}{}",
                    s.bc_mode.name(),
                    ra.equation.name(),
                    ra.corrected_gap,
                    ra.literal_gap,
                    rb.corrected_gap,
                    ratio,
                    if ok { "" } else { " FAIL" }
                ),
            ));
        }
        let used: Vec<&str> = a.rows.iter().flat_map(|r| r.terms.iter().copied()).collect();
        for d in a.discrepancies.iter().filter(|d| used.contains(&d.term)) {
            lines.push(Line::new(true, format!("{} o{order} flagged {} vs {}: {:.2e}", s.bc_mode.name(), d.term, d.corrected, d.l2)));
        }
    }
    and(lines)
}

fn main() {
    let start = Instant::now();
    let s = Scenario::default_conducting();
    let num = Numerics::default();
    let report = |r: &Result<ConvergenceReport, SweepFailure>, mode, order| match r {
        Ok(c) => c.block(mode, order).map(|b| b.report.clone()),
        Err(e) => {
            eprintln!("sweep failed: {e}");
            None
        }
    };
    let conducting = sweep(&s, &DEFAULT_EPSILONS, &[0], &[BcMode::Conducting], &num);
    let dirichlet = sweep(&s, &DEFAULT_EPSILONS, &[1], &[BcMode::Dirichlet], &num);
    let rc = report(&conducting, BcMode::Conducting, 0);
    let rd = report(&dirichlet, BcMode::Dirichlet, 1);
    let missing = || Line::new(false, "sweep did not complete");

    let criteria: Vec<(&str, Line)> = vec![
        ("1 corrected rates, conducting", rc.as_ref().map_or_else(missing, c1)),
        ("2 axial component rates", rc.as_ref().map_or_else(missing, c2)),
        ("3 uncorrected optimal rate", rc.as_ref().map_or_else(missing, c3)),
        ("4 corrected rates, Dirichlet", rd.as_ref().map_or_else(missing, c1)),
        ("5 first-order rates, Dirichlet", rd.as_ref().map_or_else(missing, c5)),
        ("6 oracles", c6()),
        ("7 structural invariants", c7()),
        ("8 remainder cross-check", c8()),
    ];
    let mut failed = 0;
    for (name, line) in &criteria {
        println!("criterion {name}: {} | {}", if line.ok { "PASS" } else { "FAIL" }, line.detail);
        failed += usize::from(!line.ok);
    }
    println!("acceptance: {} of {} criteria pass ({:.0} s)", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
