//! Assemble the conducting-wall approximant, audit its wall traces and compare
//! the substitution residual with the remainder sums.
use mhd_bl::composer::{AssemblyTerms, Composer};
use mhd_bl::ideal::IdealOuter;
use mhd_bl::prandtl::{record_steps_with_neighbours, solve_correctors, CorrectorRequest};
use mhd_bl::scenario::{BcMode, Numerics, Scenario, TimeLattice};

fn main() -> mhd_bl::Result<()> {
    let eps = 1e-3;
    let s = Scenario::default_conducting();
    let num = Numerics { nz: 1025, ..Numerics::default() };
    let grid = num.channel_grid(s.length)?;
    let lat = TimeLattice::new(s.horizon, num.dt, 0.25)?;
    let outer = IdealOuter::new(&s, &grid)?;
    let req = CorrectorRequest { epsilon: eps, bc_mode: BcMode::Conducting, order: 0, record_steps: record_steps_with_neighbours(&lat) };
    let corr = solve_correctors(&s, &outer, &num.bl_grid()?, &lat, &req)?;
    let comp = Composer::new(&outer, &corr)?;

    let approx = comp.assemble(0, AssemblyTerms::full(BcMode::Conducting, 0))?;
    let audit = comp.check_traces(&s, &approx)?;
    println!("velocity trace error {:.1e}, wall slope of h {:.1e} (largest slope {:.2})", audit.velocity, audit.magnetic, audit.slope_scale);

    let x = comp.cross_check(&s, &approx)?;
    println!("{:<4} {:>11} {:>11} {:>11}  terms", "eq", "sup |R|", "gap", "corrected");
    for r in &x.rows {
        println!("{:<4} {:11.3e} {:11.3e} {:11.3e}  {}", r.equation.name(), r.residual, r.literal_gap, r.corrected_gap, r.terms.join(" + "));
    }
    let used: Vec<&str> = x.rows.iter().flat_map(|r| r.terms.iter().copied()).collect();
    for d in x.discrepancies.iter().filter(|d| used.contains(&d.term)) {
        println!("flagged {:>6} vs {:<7} {:.3e}", d.term, d.corrected, d.l2);
    }
    Ok(())
}
