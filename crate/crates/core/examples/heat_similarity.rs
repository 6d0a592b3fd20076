//! Half-line heat solver against the erfc similarity solution.
use mhd_bl::fields::BlGrid;
use mhd_bl::prandtl::{solve_heat_halfline, weighted_decay_report_real, BcKind, HeatOptions};

fn erfc(x: f64) -> f64 {
    // Abramowitz-Stegun 7.1.26, |error| < 1.5e-7.
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let p = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    p * (-x * x).exp()
}

fn main() -> mhd_bl::Result<()> {
    let grid = BlGrid::new(12.0, 961)?;
    let t0: f64 = 1e-6;
    let init = grid.nodes().iter().map(|&z| erfc(z / (2.0 * t0.sqrt()))).collect();
    let opts = HeatOptions { initial: Some(init), t0, allow_incompatible: true };
    let steps = 1000;
    let dt = (1.0 - t0) / steps as f64;
    let sol = solve_heat_halfline(BcKind::Dirichlet, |_| 1.0, &grid, dt, steps, &opts)?;
    for n in [100, 250, 500, 1000] {
        let t = t0 + n as f64 * dt;
        let err = grid
            .nodes()
            .iter()
            .zip(&sol[n])
            .map(|(&z, &v)| (v - erfc(z / (2.0 * t.sqrt()))).abs())
            .fold(0.0, f64::max);
        let (sup, l2) = weighted_decay_report_real(&sol[n], &grid, 2)?;
        println!("t = {t:.3}: max error {err:.2e}, sup <Z>^2 v = {sup:.3}, weighted L2 = {l2:.3}");
    }

    // Compatible data: a ramp g(t) = t^2 at the wall.
    let ramp = solve_heat_halfline(BcKind::Dirichlet, |t| t * t, &grid, 1e-3, 1000, &HeatOptions::default())?;
    println!("ramp: wall {:.4}, Z=2 {:.4}, Z=6 {:.2e}", ramp[1000][0], ramp[1000][160], ramp[1000][480]);
    Ok(())
}
