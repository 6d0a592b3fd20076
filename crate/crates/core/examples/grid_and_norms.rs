//! Wall-clustered channel grid, Fourier transforms and the three error norms.
use std::f64::consts::PI;

use mhd_bl::fields::{norms, to_modal, ChannelGrid, FieldRef, PhysicalField};

fn main() -> mhd_bl::Result<()> {
    let grid = ChannelGrid::new(16, 257, 0.995, 2.0 * PI)?;
    let z = grid.z();
    println!("nz = {}, first spacing {:.3e}, mid spacing {:.3e}", grid.nz(), z[1] - z[0], z[129] - z[128]);
    for eps in [1e-2, 1e-4, 1e-6] {
        println!("eps = {eps:e}: {} nodes within sqrt(eps) of the wall", grid.nodes_within(f64::sqrt(eps), mhd_bl::fields::Wall::Lower));
    }

    // sin(x) sin(pi z): L2 = sqrt(pi/2), H1 adds the x and z derivatives.
    let f = PhysicalField::sample(&grid, |x, z| x.sin() * (PI * z).sin());
    let m = to_modal(&f, &grid)?;
    let n = norms(&[FieldRef::Modal(&m)], &grid)?;
    let l2 = (PI / 2.0).sqrt();
    println!("L2   {:.6} (exact {:.6})", n.l2, l2);
    println!("H1   {:.6} (exact {:.6})", n.h1, l2 * (2.0 + PI * PI).sqrt());
    println!("Linf {:.6} (exact 1)", n.linf);
    Ok(())
}
