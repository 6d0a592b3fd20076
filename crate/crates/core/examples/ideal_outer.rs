//! Outer (inviscid) solution of the default problem and its wall traces.
use mhd_bl::fields::{norms, FieldRef, Wall};
use mhd_bl::ideal::IdealOuter;
use mhd_bl::scenario::{Numerics, Scenario};

fn main() -> mhd_bl::Result<()> {
    let s = Scenario::default_conducting();
    let num = Numerics { nz: 513, ..Numerics::default() };
    let grid = num.channel_grid(s.length)?;
    let outer = IdealOuter::new(&s, &grid)?;
    println!("{:>5} {:>10} {:>12} {:>12} {:>12}", "t", "u1(0)", "|u2(0)| k=1", "dz u1(0)", "L2(u2,h2)");
    for i in 0..=8 {
        let t = 0.25 * i as f64;
        let tr = outer.wall_trace(t, Wall::Lower)?;
        let st = outer.at(t)?;
        let e = norms(&[FieldRef::Modal(&st.u2), FieldRef::Modal(&st.h2)], &grid)?.l2;
        println!("{t:5.2} {:10.5} {:12.5e} {:12.5e} {:12.6}", tr.u1, tr.u2[1].norm(), tr.dz_u1, e);
    }
    // The Elsasser split turns the tangential pair into two transported fields.
    let (wp, wm) = outer.elsasser_at(2.0)?;
    println!("max |w+| = {:.4}, max |w-| = {:.4}", wp.max_abs(), wm.max_abs());
    Ok(())
}
