use std::f64::consts::PI;

use mhd_bl::fields::{ChannelGrid, ModalField, Profile1D};
use mhd_bl::prandtl::BcKind;
use mhd_bl::scenario::{BcMode, Numerics, Scenario, TimeLattice};
use mhd_bl::viscous::*;
use num_complex::Complex64;

mod common;
use common::{manufactured_error, u1, EPS};

#[test]
fn manufactured_tangential_converges_at_second_order() {
    let e1 = manufactured_error(65, 0.02);
    let e2 = manufactured_error(129, 0.01);
    let e3 = manufactured_error(257, 0.005);
    let (r1, r2) = (e1 / e2, e2 / e3);
    assert!((r2 - 4.0).abs() <= 0.5, "ratios {r1} {r2} (errors {e1:e} {e2:e} {e3:e})");
}

#[test]
fn zero_data_stays_zero() {
    let grid = ChannelGrid::new(8, 33, 0.5, 2.0 * PI).unwrap();
    let lat = TimeLattice::new(0.1, 0.01, 0.05).unwrap();
    let ax: Vec<Profile1D> = (0..=lat.steps).map(|_| Profile1D::sample(&grid, 0.0, u1)).collect();
    let zero = Complex64::new(0.0, 0.0);
    let walls = |_: f64| Ok([vec![[zero; 2]; grid.nmodes()], vec![[zero; 2]; grid.nmodes()]]);
    let p = TangentialProblem {
        epsilon: EPS,
        bc_h: BcKind::Dirichlet,
        u2_0: ModalField::zeros_like(&grid),
        h2_0: ModalField::zeros_like(&grid),
        walls: &walls,
        sources: None,
    };
    let out = solve_tangential_viscous(&p, &ax, &ax, &grid, &lat, None).unwrap();
    assert!(out.iter().all(|(u, h)| u.max_abs() == 0.0 && h.max_abs() == 0.0));
}

#[test]
fn energy_never_grows_with_homogeneous_walls() {
    let mut s = Scenario::zero(2.0 * PI, 0.5, BcMode::Dirichlet);
    s.a = std::sync::Arc::new(|z| 2.0 + (PI * z).sin().powi(3));
    s.c = std::sync::Arc::new(|z| 1.0 + 0.5 * (PI * z).cos());
    s.b = std::sync::Arc::new(|x, z| x.sin() * (PI * z).sin().powi(3));
    s.d = std::sync::Arc::new(|x, z| (2.0 * x).cos() * (PI * z).sin());
    s.alpha1 = [std::sync::Arc::new(|_| 2.0), std::sync::Arc::new(|_| 2.0)];
    s.gamma1 = [std::sync::Arc::new(|_, _| 1.5), std::sync::Arc::new(|_, _| 0.5)];
    let num = Numerics { nz: 513, ..Numerics::default() };
    let (_, energy) = solve_viscous(&s, 1e-3, &num, ViscousOptions { order: 0, energy_audit: true }).unwrap();
    assert_eq!(energy.len(), 501);
    for w in energy.windows(2) {
        assert!(w[1] - w[0] <= 1e-10 * w[0].max(1.0), "energy grew: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn swap_symmetric_dirichlet_data_gives_equal_pairs() {
    let mut s = Scenario::zero(2.0 * PI, 0.3, BcMode::Dirichlet);
    s.a = std::sync::Arc::new(|z| 1.0 + z * (1.0 - z));
    s.c = s.a.clone();
    s.alpha1 = [std::sync::Arc::new(|_| 1.0), std::sync::Arc::new(|_| 1.0)];
    s.gamma1 = [std::sync::Arc::new(|_, _| 1.0), std::sync::Arc::new(|_, _| 1.0)];
    s.b = std::sync::Arc::new(|x, z| x.sin() * (PI * z).sin());
    s.d = s.b.clone();
    let num = Numerics { nz: 257, ..Numerics::default() };
    let (run, _) = solve_viscous(&s, 1e-2, &num, ViscousOptions::default()).unwrap();
    for st in &run.states {
        let d = st.u2.axpby(1.0, &st.h2, -1.0).unwrap();
        assert!(d.max_abs() <= 1e-12 * st.u2.max_abs().max(1.0));
    }
}

#[test]
fn default_run_pins_wall_rows() {
    let s = Scenario::default_dirichlet();
    let num = Numerics { nz: 513, ..Numerics::default() };
    let grid = num.channel_grid(s.length).unwrap();
    let (run, _) = solve_viscous(&s, 1e-2, &num, ViscousOptions { order: 1, energy_audit: false }).unwrap();
    let last = grid.nz() - 1;
    for st in &run.states {
        let wd = scenario_wall_data(&s, &grid, 1e-2, st.time);
        for k in 0..grid.nmodes() {
            assert_eq!(st.u2.get(k, 0), wd[0][k][0]);
            assert_eq!(st.h2.get(k, last), wd[1][k][1]);
        }
        assert!(st.u2.is_finite() && st.h2.is_finite());
    }
}

#[test]
fn under_resolved_mesh_warns() {
    let s = Scenario::default_conducting();
    let num = Numerics { nz: 65, stretch: 0.0, ..Numerics::default() };
    let (run, _) = solve_viscous(&s, 1e-4, &num, ViscousOptions::default()).unwrap();
    assert!(run.warnings.iter().any(|w| w.contains("under-resolves")));
}
