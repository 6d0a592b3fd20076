//! Second-order self-convergence of the viscous solver on a manufactured
//! solution u = e^{-t} sin x sin(pi z), h = e^{-t} cos x cos(pi z).
use std::f64::consts::PI;

use mhd_bl::fields::{to_modal, ChannelGrid, ModalField, PhysicalField, Profile1D};
use mhd_bl::prandtl::BcKind;
use mhd_bl::scenario::TimeLattice;
use mhd_bl::viscous::{modal_energy, solve_tangential_viscous, TangentialProblem};
use num_complex::Complex64;

const EPS: f64 = 0.1;
const B0: f64 = 0.5;

fn u(t: f64, x: f64, z: f64) -> f64 {
    (-t).exp() * x.sin() * (PI * z).sin()
}

fn h(t: f64, x: f64, z: f64) -> f64 {
    (-t).exp() * x.cos() * (PI * z).cos()
}

fn error(nz: usize, dt: f64) -> mhd_bl::Result<f64> {
    let grid = ChannelGrid::new(8, nz, 0.5, 2.0 * PI)?;
    let lat = TimeLattice::new(0.5, dt, 0.5)?;
    let axial: Vec<Profile1D> = (0..=lat.steps).map(|s| Profile1D::sample(&grid, lat.time(s), |z| 1.0 + z)).collect();
    let field: Vec<Profile1D> = (0..=lat.steps).map(|s| Profile1D::sample(&grid, lat.time(s), |_| B0)).collect();
    let lap = 1.0 + PI * PI;
    let src = |t: f64| -> mhd_bl::Result<(ModalField, ModalField)> {
        let e = (-t).exp();
        let fu = PhysicalField::sample(&grid, |x, z| {
            (EPS * lap - 1.0) * u(t, x, z) + (1.0 + z) * e * x.cos() * (PI * z).sin() + B0 * e * x.sin() * (PI * z).cos()
        });
        let fh = PhysicalField::sample(&grid, |x, z| {
            (EPS * lap - 1.0) * h(t, x, z) - (1.0 + z) * e * x.sin() * (PI * z).cos() - B0 * e * x.cos() * (PI * z).sin()
        });
        Ok((to_modal(&fu, &grid)?, to_modal(&fh, &grid)?))
    };
    let zero = Complex64::new(0.0, 0.0);
    let walls = |_: f64| Ok([vec![[zero; 2]; grid.nmodes()], vec![[zero; 2]; grid.nmodes()]]);
    let p = TangentialProblem {
        epsilon: EPS,
        bc_h: BcKind::Neumann,
        u2_0: to_modal(&PhysicalField::sample(&grid, |x, z| u(0.0, x, z)), &grid)?,
        h2_0: to_modal(&PhysicalField::sample(&grid, |x, z| h(0.0, x, z)), &grid)?,
        walls: &walls,
        sources: Some(&src),
    };
    let out = solve_tangential_viscous(&p, &axial, &field, &grid, &lat, None)?;
    let (un, hn) = out.last().expect("final state");
    let du = un.axpby(1.0, &to_modal(&PhysicalField::sample(&grid, |x, z| u(0.5, x, z)), &grid)?, -1.0)?;
    let dh = hn.axpby(1.0, &to_modal(&PhysicalField::sample(&grid, |x, z| h(0.5, x, z)), &grid)?, -1.0)?;
    Ok((modal_energy(&du, &grid) + modal_energy(&dh, &grid)).sqrt())
}

fn main() -> mhd_bl::Result<()> {
    let mut prev: Option<f64> = None;
    for (nz, dt) in [(65, 0.02), (129, 0.01), (257, 0.005), (513, 0.0025)] {
        let e = error(nz, dt)?;
        match prev {
            Some(p) => println!("nz {nz:4} dt {dt:.4}: error {e:.3e}, ratio {:.2}", p / e),
            None => println!("nz {nz:4} dt {dt:.4}: error {e:.3e}"),
        }
        prev = Some(e);
    }
    Ok(())
}
