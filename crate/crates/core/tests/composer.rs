use std::f64::consts::PI;

use mhd_bl::composer::*;
use mhd_bl::fields::{ChannelGrid, Wall};
use mhd_bl::ideal::IdealOuter;
use mhd_bl::prandtl::{record_steps_with_neighbours, solve_correctors, CorrectorRequest, CorrectorSet};
use mhd_bl::scenario::{BcMode, Numerics, Scenario, TimeLattice};

fn small() -> Numerics {
    Numerics { nx: 8, nz: 513, dt: 2e-3, cadence: 0.1, nzb: 481, ..Numerics::default() }
}

fn setup(s: &Scenario, num: &Numerics, eps: f64, order: u8) -> (ChannelGrid, CorrectorSet) {
    let grid = num.channel_grid(s.length).unwrap();
    let lat = TimeLattice::new(s.horizon, num.dt, num.cadence).unwrap();
    let outer = IdealOuter::new(s, &grid).unwrap();
    let req = CorrectorRequest { epsilon: eps, bc_mode: s.bc_mode, order, record_steps: record_steps_with_neighbours(&lat) };
    let corr = solve_correctors(s, &outer, &num.bl_grid().unwrap(), &lat, &req).unwrap();
    (grid, corr)
}

fn short(s: Scenario) -> Scenario {
    Scenario { horizon: 0.5, ..s }
}

#[test]
fn dirichlet_traces_are_exact() {
    let s = short(Scenario::default_dirichlet());
    let num = small();
    let (grid, corr) = setup(&s, &num, 1e-3, 1);
    let outer = IdealOuter::new(&s, &grid).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let approx = comp.assemble(1, AssemblyTerms::full(BcMode::Dirichlet, 1)).unwrap();
    let audit = comp.check_traces(&s, &approx).unwrap();
    assert!(audit.velocity < 1e-12, "{audit:?}");
    assert!(audit.magnetic < 1e-12, "{audit:?}");
}

fn conducting_slopes(nz: usize) -> (f64, f64) {
    let mut s = short(Scenario::default_conducting());
    // Tilted field so the outer solution has a nonzero wall slope for eta to cancel.
    s.c = std::sync::Arc::new(|z| 1.0 + 0.5 * (PI * z).cos() + 0.1 * (z - 0.5).powi(3));
    let num = Numerics { nz, ..small() };
    let (grid, corr) = setup(&s, &num, 1e-3, 0);
    let outer = IdealOuter::new(&s, &grid).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let with = comp.assemble(0, AssemblyTerms::full(BcMode::Conducting, 0)).unwrap();
    let without = comp.assemble(0, AssemblyTerms::COMPOSITE).unwrap();
    let a = comp.check_traces(&s, &with).unwrap();
    let b = comp.check_traces(&s, &without).unwrap();
    assert!(a.velocity < 1e-12);
    (a.magnetic, b.magnetic)
}

#[test]
fn conducting_wall_slopes_vanish_at_second_order() {
    let (a1, b1) = conducting_slopes(513);
    let (a2, _) = conducting_slopes(1025);
    assert!(b1 > 1e-2);
    assert!(a1 < 1e-2 * b1, "{a1:e} vs {b1:e}");
    assert!((a1 / a2 - 4.0).abs() < 0.5, "{a1:e} {a2:e}");
}

#[test]
fn eta_has_unit_wall_slope_and_compact_support() {
    let h = 1e-6;
    let fd = (-eta_shape(2.0 * h)[0] + 4.0 * eta_shape(h)[0] - 3.0 * eta_shape(0.0)[0]) / (2.0 * h);
    assert!((fd - 1.0).abs() < 1e-8);
    let (a1, a2) = eta_amplitudes(0.3, &[num_complex::Complex64::new(0.2, -0.1)], Wall::Lower);
    assert_eq!(a1, -0.3);
    assert_eq!(a2[0], num_complex::Complex64::new(-0.2, 0.1));
    let (b1, _) = eta_amplitudes(0.3, &[], Wall::Upper);
    assert_eq!(b1, 0.3);
    for i in 0..100 {
        assert_eq!(eta_shape(2.0 + i as f64 * 0.1), [0.0; 3]);
    }
}

#[test]
fn zero_mismatch_reduces_to_outer() {
    let mut s = short(Scenario::default_conducting());
    s.alpha2 = [std::sync::Arc::new(|_, _| 0.0), std::sync::Arc::new(|_, _| 0.0)];
    s.b = std::sync::Arc::new(|_, _| 0.0);
    s.d = std::sync::Arc::new(|_, _| 0.0);
    s.f1 = std::sync::Arc::new(|_, _| 0.0);
    let num = small();
    let (grid, corr) = setup(&s, &num, 1e-3, 0);
    let outer = IdealOuter::new(&s, &grid).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let approx = comp.assemble(0, AssemblyTerms::full(BcMode::Conducting, 0)).unwrap();
    for snap in approx.snapshots() {
        let o = outer.at(snap.time).unwrap();
        let du = snap.u1.axpby(1.0, &o.u1, -1.0).unwrap();
        assert!(du.values.iter().all(|v| v.abs() < 1e-12));
        assert!(snap.u2.axpby(1.0, &o.u2, -1.0).unwrap().max_abs() < 1e-12);
        assert!(snap.h2.axpby(1.0, &o.h2, -1.0).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn cross_check_smoke() {
    let s = short(Scenario::default_dirichlet());
    let num = small();
    let (grid, corr) = setup(&s, &num, 1e-3, 0);
    let outer = IdealOuter::new(&s, &grid).unwrap();
    let comp = Composer::new(&outer, &corr).unwrap();
    let approx = comp.assemble(0, AssemblyTerms::full(BcMode::Dirichlet, 0)).unwrap();
    let x = comp.cross_check(&s, &approx).unwrap();
    assert_eq!(x.rows.len(), 4);
    for r in &x.rows {
        assert!(r.residual.is_finite() && r.literal_gap.is_finite() && r.corrected_gap.is_finite());
        assert!(!r.terms.is_empty());
    }
    assert_eq!(x.discrepancies.len(), FLAGGED_PAIRS.len());
    let u1 = x.rows.iter().find(|r| r.equation == Equation::U1).unwrap();
    assert!(u1.literal_gap < 1e-2, "{u1:?}");
}

#[test]
fn cutoff_partition_is_exact() {
    for i in 0..=10_000 {
        let z = i as f64 / 10_000.0;
        assert_eq!(psi(z).unwrap()[0] * psi(1.0 - z).unwrap()[0], 0.0);
    }
}
