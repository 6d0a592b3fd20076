//! Epsilon sweep with log-log slope fits for both wall modes.
//!
//! Takes a few minutes at the default resolution; pass `quick` for a coarse run.
use mhd_bl::lab::{sweep, DEFAULT_EPSILONS};
use mhd_bl::scenario::{BcMode, Numerics, Scenario};

fn main() {
    let quick = std::env::args().any(|a| a == "quick");
    let num = if quick { Numerics { nz: 513, dt: 4e-3, cadence: 0.1, ..Numerics::default() } } else { Numerics::default() };
    let s = Scenario::default_conducting();
    let blocks = [(BcMode::Conducting, 0u8), (BcMode::Dirichlet, 1u8)];
    for (mode, order) in blocks {
        let report = match sweep(&s, &DEFAULT_EPSILONS, &[order], &[mode], &num) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("sweep failed: {e}");
                std::process::exit(2);
            }
        };
        let b = report.block(mode, order).expect("requested block");
        println!("== {} walls, order {order}", mode.name());
        for e in b.report.entries.iter().filter(|e| e.theory.is_some()) {
            let verdict = match e.pass {
                Some(true) => "pass",
                _ => "FAIL",
            };
            println!(
                "{:<9} {:<4} {:<5} slope {:6.3}  r2 {:.4}  theory {:.2}±{:.2}  {verdict}",
                e.target.to_string(),
                e.component.to_string(),
                e.norm.name(),
                e.slope,
                e.r2,
                e.theory.unwrap_or(f64::NAN),
                e.tolerance.unwrap_or(f64::NAN)
            );
        }
        for c in &b.report.checks {
            println!("check {:<40} {}  ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
        }
    }
}
