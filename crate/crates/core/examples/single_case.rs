//! One viscous run at a chosen epsilon and its errors against every target.
//!
//! Usage: `cargo run --release --example single_case -- [epsilon] [conducting|dirichlet] [order]`
use mhd_bl::lab::run_case;
use mhd_bl::scenario::{BcMode, Numerics, Scenario};

fn main() -> mhd_bl::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let eps: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(1e-3);
    let mode = args.get(1).and_then(|a| BcMode::parse(a)).unwrap_or(BcMode::Conducting);
    let order: u8 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(0);

    let case = run_case(&Scenario::default_conducting(), eps, order, mode, &Numerics::default())?;
    println!("eps = {eps:e}, {} walls, order {order}", mode.name());
    println!("{:<9} {:<4} {:>11} {:>11} {:>11}", "target", "part", "L2", "H1", "Linf");
    for r in &case.rows {
        println!("{:<9} {:<4} {:11.3e} {:11.3e} {:11.3e}", r.target.to_string(), r.component.to_string(), r.norms.l2, r.norms.h1, r.norms.linf);
    }
    for w in &case.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
