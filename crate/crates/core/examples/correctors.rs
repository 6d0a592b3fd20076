//! Boundary-layer correctors of the default Dirichlet problem at one epsilon.
use mhd_bl::fields::Wall;
use mhd_bl::ideal::IdealOuter;
use mhd_bl::prandtl::{solve_correctors, weighted_decay_report, CorrectorRequest};
use mhd_bl::scenario::{BcMode, Numerics, Scenario, TimeLattice};

fn main() -> mhd_bl::Result<()> {
    let s = Scenario::default_dirichlet();
    let num = Numerics { nz: 513, ..Numerics::default() };
    let grid = num.channel_grid(s.length)?;
    let bl = num.bl_grid()?;
    let lat = TimeLattice::new(s.horizon, num.dt, 0.5)?;
    let outer = IdealOuter::new(&s, &grid)?;
    let req = CorrectorRequest { epsilon: 1e-3, bc_mode: BcMode::Dirichlet, order: 1, record_steps: lat.snapshot_steps() };
    let corr = solve_correctors(&s, &outer, &bl, &lat, &req)?;

    for wall in Wall::BOTH {
        let wc = corr.wall(wall);
        println!("{} wall", wall.name());
        for (r, &step) in req.record_steps.iter().enumerate() {
            let th = &wc.theta2[r];
            let (sup, _) = weighted_decay_report(th.mode(1), &bl, 2)?;
            let first = wc.theta2_1.as_ref().map_or(0.0, |v| v[r].max_abs());
            println!(
                "  t={:.1}  theta1(0)={:+.4}  h1(0)={:+.2e}  |theta2|={:.4}  sup <Z>^2|theta2_k1|={:.4}  |theta2^1|={:.4}",
                lat.time(step),
                wc.theta1[step][0],
                wc.h1[step][0],
                th.max_abs(),
                sup,
                first
            );
        }
    }
    for w in corr.decay_warnings() {
        println!("warning: {w}");
    }
    Ok(())
}
