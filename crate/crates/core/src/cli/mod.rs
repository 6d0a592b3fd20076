//! Command-line front end: config loading, subcommand dispatch and artifact files.
//!
//! Logs go to standard error. Standard output carries only the paths of
//! written artifacts (or the defaults file for `defaults`).

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use config::{defaults_toml, parse_config, ConfigErrors, RunConfig};

use crate::composer::{residual, AssemblyTerms, Composer, Equation, TermField};
use crate::error::{Error, Result};
use crate::fields::ModalField;
use crate::ideal::IdealOuter;
use crate::lab::{run_case, sweep, ErrorTable, RateReport, SCHEMA_VERSION};
use crate::prandtl::{record_steps_with_neighbours, solve_correctors, weighted_decay_report, weighted_decay_report_real, CorrectorRequest};
use crate::scenario::{Scenario, TimeLattice};
use crate::viscous::check_compatibility;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_RATE_GATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mhd-bl", version, about = "Boundary-layer expansions for plane-parallel MHD channel flow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config file; documented defaults when omitted.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Compatibility residuals of the scenario data.
    Check,
    /// Outer solution and wall traces.
    Ideal,
    /// Boundary-layer correctors and their weighted decay.
    Correctors,
    /// Approximant, substitution residuals and the remainder cross-check.
    Assemble {
        /// Also write per-term remainder norms.
        #[arg(long)]
        emit_remainders: bool,
    },
    /// One viscous case with its error rows.
    Solve,
    /// Full ε-sweep and rate report.
    Rates,
    /// Print the documented defaults as a config file.
    Defaults,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Precondition(_) | Error::Compatibility(_) => EXIT_VALIDATION,
        _ => EXIT_SOLVER,
    }
}

/// Parse the process arguments and run; returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    run(Cli::parse())
}

pub fn run(cli: Cli) -> i32 {
    if cli.command == Command::Defaults {
        print!("{}", defaults_toml());
        return EXIT_OK;
    }
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            log::warn!("--jobs ignored: {e}");
        }
    }
    let text = match &cli.config {
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                log::error!("cannot read {}: {e}", p.display());
                return EXIT_VALIDATION;
            }
        },
        None => String::new(),
    };
    let mut cfg = match parse_config(&text, Some(cli.command)) {
        Ok(c) => c,
        Err(errs) => {
            for e in &errs.0 {
                log::error!("config: {e}");
            }
            return EXIT_VALIDATION;
        }
    };
    if let Some(o) = cli.out {
        cfg.output_dir = o;
    }
    if let Command::Assemble { emit_remainders: true } = cli.command {
        cfg.emit_remainders = true;
    }
    match dispatch(cli.command, &cfg) {
        Ok((paths, code)) => {
            for p in paths {
                println!("{}", p.display());
            }
            code
        }
        Err(e) => {
            log::error!("{e}");
            exit_code(&e)
        }
    }
}

struct Artifacts<'a> {
    dir: &'a Path,
    config: serde_json::Value,
    written: Vec<PathBuf>,
}

impl Artifacts<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Wrapped<'b, T> {
            schema_version: u32,
            config: &'b serde_json::Value,
            #[serde(flatten)]
            body: &'b T,
        }
        let w = Wrapped { schema_version: SCHEMA_VERSION, config: &self.config, body };
        let text = serde_json::to_string_pretty(&w).map_err(|e| Error::Io(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    fn csv_header(&self) -> String {
        format!("config: {}", self.config)
    }
}

/// Run one subcommand; returns the written artifact paths and the exit code.
pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<(Vec<PathBuf>, i32)> {
    let mut art = Artifacts { dir: &cfg.output_dir, config: cfg.to_json(), written: Vec::new() };
    let base = cfg.scenario.build()?;
    let mode = cfg.bc_modes[0];
    let s = base.clone().with_mode(mode);
    let num = &cfg.numerics;
    let order = cfg.max_order();
    let mut code = EXIT_OK;
    match command {
        Command::Defaults => {}
        Command::Check => {
            let report = check_compatibility(&s, order, cfg.epsilon);
            for r in &report.rows {
                let flag = if r.pass { "ok" } else { "FAIL" };
                log::info!("{flag:4} order {} {:<40} {:<5} residual {:.3e} (tol {:.0e})", r.order, r.condition, r.wall, r.residual, r.tolerance);
            }
            if !report.passed() {
                code = EXIT_VALIDATION;
            }
            art.json("check.json", &serde_json::json!({ "passed": report.passed(), "report": report }))?;
        }
        Command::Ideal => {
            let grid = num.channel_grid(s.length)?;
            let lat = TimeLattice::new(s.horizon, num.dt, num.cadence)?;
            let outer = IdealOuter::new(&s, &grid)?;
            let sol = outer.solve(&lat.snapshot_times())?;
            let mut csv = format!("# {}\nt,wall,quantity,k,re,im\n", art.csv_header());
            for (w, traces) in ["lower", "upper"].iter().zip(&sol.traces) {
                for tr in traces {
                    for (q, v) in [("u1", tr.u1), ("h1", tr.h1), ("dz_u1", tr.dz_u1), ("dz_h1", tr.dz_h1)] {
                        csv.push_str(&format!("{},{w},{q},0,{v:e},0\n", tr.t));
                    }
                    for (q, v) in [("u2", &tr.u2), ("h2", &tr.h2), ("dz_u2", &tr.dz_u2), ("dz_h2", &tr.dz_h2)] {
                        for (k, c) in v.iter().enumerate() {
                            csv.push_str(&format!("{},{w},{q},{k},{:e},{:e}\n", tr.t, c.re, c.im));
                        }
                    }
                }
            }
            art.write("ideal_traces.csv", &csv)?;
        }
        Command::Correctors => {
            let grid = num.channel_grid(s.length)?;
            let bl = num.bl_grid()?;
            let lat = TimeLattice::new(s.horizon, num.dt, num.cadence)?;
            let outer = IdealOuter::new(&s, &grid)?;
            let req = CorrectorRequest { epsilon: cfg.epsilon, bc_mode: mode, order, record_steps: lat.snapshot_steps() };
            let corr = solve_correctors(&s, &outer, &bl, &lat, &req)?;
            #[derive(Serialize)]
            struct DecayRow {
                wall: &'static str,
                t: f64,
                quantity: &'static str,
                k: usize,
                sup_weighted: f64,
                l2_weighted: f64,
            }
            let mut rows = Vec::new();
            for wc in &corr.walls {
                for (r, &step) in corr.record_steps.iter().enumerate() {
                    let t = lat.time(step);
                    for (q, v) in [("theta1", &wc.theta1[step]), ("h1", &wc.h1[step])] {
                        let (sup, l2) = weighted_decay_report_real(v, &bl, 2)?;
                        rows.push(DecayRow { wall: wc.wall.name(), t, quantity: q, k: 0, sup_weighted: sup, l2_weighted: l2 });
                    }
                    let mut modal = vec![("theta2", &wc.theta2[r]), ("h2", &wc.h2[r])];
                    if let (Some(a), Some(b)) = (&wc.theta2_1, &wc.h2_1) {
                        modal.push(("theta2_1", &a[r]));
                        modal.push(("h2_1", &b[r]));
                    }
                    for (q, m) in modal {
                        for k in 0..m.nmodes {
                            let (sup, l2) = weighted_decay_report(m.mode(k), &bl, 2)?;
                            rows.push(DecayRow { wall: wc.wall.name(), t, quantity: q, k, sup_weighted: sup, l2_weighted: l2 });
                        }
                    }
                }
            }
            let warnings = corr.decay_warnings();
            for w in &warnings {
                log::warn!("{w}");
            }
            art.json(
                "correctors.json",
                &serde_json::json!({ "epsilon": cfg.epsilon, "bc_mode": mode, "order": order, "weight_power": 2, "warnings": warnings, "decay": rows }),
            )?;
        }
        Command::Assemble { .. } => assemble(&mut art, cfg, &s, order)?,
        Command::Solve => {
            let case = run_case(&base, cfg.epsilon, order, mode, num)?;
            for w in &case.warnings {
                log::warn!("{w}");
            }
            let mut table = ErrorTable::new(mode, order);
            table.push_case(case.rows)?;
            art.write("errors.csv", &table.to_csv(&[art.csv_header()]))?;
            if cfg.export_snapshots {
                let grid = num.channel_grid(s.length)?;
                let z = grid.z();
                let header = format!("# {}\nt,k,z,re,im\n", art.csv_header());
                let (mut u1, mut h1, mut u2, mut h2) = (header.clone(), header.clone(), header.clone(), header);
                let modal = |out: &mut String, t: f64, m: &ModalField| {
                    for k in 0..m.nmodes() {
                        for (j, c) in m.mode(k).iter().enumerate() {
                            out.push_str(&format!("{t},{k},{:e},{:e},{:e}\n", z[j], c.re, c.im));
                        }
                    }
                };
                for st in &case.viscous.states {
                    for (j, (a, b)) in st.u1.values.iter().zip(&st.h1.values).enumerate() {
                        u1.push_str(&format!("{},0,{:e},{a:e},0\n", st.time, z[j]));
                        h1.push_str(&format!("{},0,{:e},{b:e},0\n", st.time, z[j]));
                    }
                    modal(&mut u2, st.time, &st.u2);
                    modal(&mut h2, st.time, &st.h2);
                }
                for (name, body) in [("u1", u1), ("h1", h1), ("u2", u2), ("h2", h2)] {
                    art.write(&format!("snapshots_{name}.csv"), &body)?;
                }
            }
        }
        Command::Rates => match sweep(&base, &cfg.epsilons, &cfg.orders, &cfg.bc_modes, num) {
            Ok(rep) => {
                for b in &rep.blocks {
                    let tag = format!("{}_o{}", b.table.bc_mode, b.table.order);
                    art.write(&format!("errors_{tag}.csv"), &b.table.to_csv(&[art.csv_header()]))?;
                    let mut report: RateReport = b.report.clone();
                    report.config = Some(art.config.clone());
                    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
                    art.write(&format!("rates_{tag}.json"), &(text + "\n"))?;
                    for e in &report.entries {
                        art.write(&format!("fits/{tag}_{}.dat", e.file_stem()), &e.gnuplot())?;
                        if e.pass == Some(false) {
                            log::warn!(
                                "{tag}: {} {} {} slope {:.3} (theory {:?}, r2 {:.3})",
                                e.target,
                                e.component,
                                e.norm.name(),
                                e.slope,
                                e.theory,
                                e.r2
                            );
                        }
                    }
                }
                if !rep.passed() {
                    code = EXIT_RATE_GATE;
                }
            }
            Err(fail) => {
                for t in &fail.partial {
                    let tag = format!("{}_o{}", t.bc_mode, t.order);
                    art.write(&format!("errors_{tag}.partial.csv"), &t.to_csv(&[art.csv_header()]))?;
                }
                log::error!("sweep aborted: {}", fail.error);
                for p in &art.written {
                    println!("{}", p.display());
                }
                return Err(fail.error);
            }
        },
    }
    Ok((art.written, code))
}

fn assemble(art: &mut Artifacts<'_>, cfg: &RunConfig, s: &Scenario, order: u8) -> Result<()> {
    let num = &cfg.numerics;
    let grid = num.channel_grid(s.length)?;
    let bl = num.bl_grid()?;
    let lat = TimeLattice::new(s.horizon, num.dt, num.cadence)?;
    let outer = IdealOuter::new(s, &grid)?;
    let req = CorrectorRequest {
        epsilon: cfg.epsilon,
        bc_mode: s.bc_mode,
        order,
        record_steps: record_steps_with_neighbours(&lat),
    };
    let corr = solve_correctors(s, &outer, &bl, &lat, &req)?;
    let comp = Composer::new(&outer, &corr)?;
    let approx = comp.assemble(order, AssemblyTerms::full(s.bc_mode, order))?;
    let audit = comp.check_traces(s, &approx)?;
    let res = residual(&approx, s, &grid, cfg.epsilon)?;
    let mut csv = format!("# {}\nt,equation,l2\n", art.csv_header());
    for r in &res {
        for (eq, f) in [
            (Equation::U1, TermField::Profile(r.u1.clone())),
            (Equation::U2, TermField::Modal(r.u2.clone())),
            (Equation::H1, TermField::Profile(r.h1.clone())),
            (Equation::H2, TermField::Modal(r.h2.clone())),
        ] {
            csv.push_str(&format!("{},{},{:e}\n", r.time, eq.name(), f.l2(&grid)?));
        }
    }
    art.write("residuals.csv", &csv)?;
    let cross = comp.cross_check(s, &approx)?;
    for r in &cross.rows {
        log::info!("{}: literal gap {:.3e}, corrected gap {:.3e}", r.equation.name(), r.literal_gap, r.corrected_gap);
    }
    if cfg.emit_remainders {
        let mut csv = format!("# {}\nt,term,equation,l2,discrepancy\n", art.csv_header());
        for n in &cross.term_norms {
            let d = n.discrepancy.map(|d| format!("{d:e}")).unwrap_or_default();
            csv.push_str(&format!("{},{},{},{:e},{d}\n", n.t, n.term, n.equation.name(), n.l2));
        }
        art.write("remainders.csv", &csv)?;
    }
    art.json(
        "assemble.json",
        &serde_json::json!({
            "epsilon": cfg.epsilon,
            "bc_mode": s.bc_mode,
            "order": order,
            "trace_audit": audit,
            "cross_check": { "rows": cross.rows, "discrepancies": cross.discrepancies },
            "warnings": corr.decay_warnings(),
        }),
    )
}
