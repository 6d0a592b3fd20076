use std::f64::consts::PI;

use mhd_bl::fields::{to_modal, ChannelGrid, ModalField, PhysicalField, Profile1D};
use mhd_bl::prandtl::BcKind;
use mhd_bl::scenario::TimeLattice;
use mhd_bl::viscous::{modal_energy, solve_tangential_viscous, TangentialProblem};
use mhd_bl::Result;
use num_complex::Complex64;

pub const EPS: f64 = 0.1;
const B0: f64 = 0.5;

pub fn u1(z: f64) -> f64 {
    1.0 + z
}

fn u_star(t: f64, x: f64, z: f64) -> f64 {
    (-t).exp() * x.sin() * (PI * z).sin()
}

fn h_star(t: f64, x: f64, z: f64) -> f64 {
    (-t).exp() * x.cos() * (PI * z).cos()
}

/// Error of the manufactured tangential run at t = 0.5 on (nz, dt).
pub fn manufactured_error(nz: usize, dt: f64) -> f64 {
    let grid = ChannelGrid::new(8, nz, 0.5, 2.0 * PI).unwrap();
    let lat = TimeLattice::new(0.5, dt, 0.5).unwrap();
    let ax: Vec<Profile1D> = (0..=lat.steps).map(|s| Profile1D::sample(&grid, lat.time(s), u1)).collect();
    let hx: Vec<Profile1D> = (0..=lat.steps).map(|s| Profile1D::sample(&grid, lat.time(s), |_| B0)).collect();
    let lap = 1.0 + PI * PI;
    let src = |t: f64| -> Result<(ModalField, ModalField)> {
        let fu = PhysicalField::sample(&grid, |x, z| {
            let e = (-t).exp();
            -u_star(t, x, z) + EPS * lap * u_star(t, x, z) + u1(z) * e * x.cos() * (PI * z).sin()
                - B0 * (-e * x.sin() * (PI * z).cos())
        });
        let fh = PhysicalField::sample(&grid, |x, z| {
            let e = (-t).exp();
            -h_star(t, x, z) + EPS * lap * h_star(t, x, z) + u1(z) * (-e * x.sin() * (PI * z).cos())
                - B0 * e * x.cos() * (PI * z).sin()
        });
        Ok((to_modal(&fu, &grid)?, to_modal(&fh, &grid)?))
    };
    let zero = Complex64::new(0.0, 0.0);
    let walls = |_: f64| Ok([vec![[zero; 2]; grid.nmodes()], vec![[zero; 2]; grid.nmodes()]]);
    let p = TangentialProblem {
        epsilon: EPS,
        bc_h: BcKind::Neumann,
        u2_0: to_modal(&PhysicalField::sample(&grid, |x, z| u_star(0.0, x, z)), &grid).unwrap(),
        h2_0: to_modal(&PhysicalField::sample(&grid, |x, z| h_star(0.0, x, z)), &grid).unwrap(),
        walls: &walls,
        sources: Some(&src),
    };
    let out = solve_tangential_viscous(&p, &ax, &hx, &grid, &lat, None).unwrap();
    let (u, h) = out.last().unwrap();
    let eu = to_modal(&PhysicalField::sample(&grid, |x, z| u_star(0.5, x, z)), &grid).unwrap();
    let eh = to_modal(&PhysicalField::sample(&grid, |x, z| h_star(0.5, x, z)), &grid).unwrap();
    let du = u.axpby(1.0, &eu, -1.0).unwrap();
    let dh = h.axpby(1.0, &eh, -1.0).unwrap();
    (modal_energy(&du, &grid) + modal_energy(&dh, &grid)).sqrt()
}

