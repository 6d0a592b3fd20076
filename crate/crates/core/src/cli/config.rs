//! Run configuration: a flat TOML file plus an optional `[scenario]` table.

use std::path::PathBuf;

use serde::Serialize;
use toml::{Table, Value};

use crate::lab::{validate_epsilons, DEFAULT_EPSILONS};
use crate::scenario::{BcMode, Numerics, ScenarioParams};

use super::Command;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioParams,
    /// ε list of a rate sweep.
    pub epsilons: Vec<f64>,
    /// ε of single-case subcommands.
    pub epsilon: f64,
    pub orders: Vec<u8>,
    pub bc_modes: Vec<BcMode>,
    #[serde(flatten)]
    pub numerics: Numerics,
    pub output_dir: PathBuf,
    pub emit_remainders: bool,
    /// Write viscous snapshots as `t,k,z,re,im` CSV from `solve`.
    pub export_snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let scenario = ScenarioParams::named("default-conducting").expect("shipped scenario");
        Self {
            bc_modes: vec![scenario.bc_mode()],
            scenario,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            epsilon: 1e-2,
            orders: vec![0],
            numerics: Numerics::default(),
            output_dir: PathBuf::from("mhd-bl-out"),
            emit_remainders: false,
            export_snapshots: false,
        }
    }
}

impl RunConfig {
    pub fn max_order(&self) -> u8 {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Every problem found in a config file, each prefixed by its key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.join("\n"))
    }
}

impl std::error::Error for ConfigErrors {}

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn float(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.errors.push(format!("{path}: expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn uint(&mut self, path: &str, v: &Value) -> Option<usize> {
        match v {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            other => {
                self.errors.push(format!("{path}: expected a non-negative integer, found {}", other.type_str()));
                None
            }
        }
    }

    fn string<'v>(&mut self, path: &str, v: &'v Value) -> Option<&'v str> {
        match v {
            Value::String(s) => Some(s),
            other => {
                self.errors.push(format!("{path}: expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn boolean(&mut self, path: &str, v: &Value) -> Option<bool> {
        match v {
            Value::Boolean(b) => Some(*b),
            other => {
                self.errors.push(format!("{path}: expected true or false, found {}", other.type_str()));
                None
            }
        }
    }

    fn array<'v>(&mut self, path: &str, v: &'v Value) -> Option<&'v [Value]> {
        match v {
            Value::Array(a) => Some(a),
            other => {
                self.errors.push(format!("{path}: expected an array, found {}", other.type_str()));
                None
            }
        }
    }

    fn bc_mode(&mut self, path: &str, v: &Value) -> Option<BcMode> {
        let s = self.string(path, v)?;
        let m = BcMode::parse(s);
        if m.is_none() {
            self.errors.push(format!("{path}: unknown wall mode '{s}' (expected conducting or dirichlet)"));
        }
        m
    }
}

fn read_scenario(r: &mut Reader, t: &Table, p: &mut ScenarioParams) {
    if let Some(v) = t.get("base") {
        if let Some(s) = r.string("scenario.base", v) {
            match ScenarioParams::named(s) {
                Ok(base) => *p = base,
                Err(e) => r.errors.push(format!("scenario.base: {e}")),
            }
        }
    }
    for (k, v) in t {
        let path = format!("scenario.{k}");
        match k.as_str() {
            "base" => {}
            "length" => p.length = r.float(&path, v).unwrap_or(p.length),
            "horizon" => p.horizon = r.float(&path, v).unwrap_or(p.horizon),
            "wall_shear" => p.wall_shear = r.float(&path, v).unwrap_or(p.wall_shear),
            "forcing" => p.forcing = r.float(&path, v).unwrap_or(p.forcing),
            "wall_slip" => p.wall_slip = r.float(&path, v).unwrap_or(p.wall_slip),
            _ => r.errors.push(format!("{path}: unknown key")),
        }
    }
    if !(p.length > 0.0) {
        r.errors.push(format!("scenario.length: must be positive (got {})", p.length));
    }
    if !(p.horizon > 0.0) {
        r.errors.push(format!("scenario.horizon: must be positive (got {})", p.horizon));
    }
}

/// Parse and validate a config for `command`; all errors are returned together.
pub fn parse_config(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigErrors(vec![format!("syntax: {}", e.message())]))?;
    let mut r = Reader { errors: Vec::new() };
    let mut cfg = RunConfig::default();
    let mut modes_given = false;
    if let Some(v) = table.get("scenario") {
        match v {
            Value::String(s) => match ScenarioParams::named(s) {
                Ok(p) => cfg.scenario = p,
                Err(e) => r.errors.push(format!("scenario: {e}")),
            },
            Value::Table(t) => read_scenario(&mut r, t, &mut cfg.scenario),
            other => r.errors.push(format!("scenario: expected a name or a table, found {}", other.type_str())),
        }
    }
    let num = &mut cfg.numerics;
    for (k, v) in &table {
        let k = k.as_str();
        match k {
            "scenario" => {}
            "epsilons" => {
                if let Some(a) = r.array(k, v) {
                    let vals: Vec<Option<f64>> = a.iter().enumerate().map(|(i, x)| r.float(&format!("epsilons[{i}]"), x)).collect();
                    if vals.iter().all(Option::is_some) {
                        cfg.epsilons = vals.into_iter().flatten().collect();
                    }
                }
            }
            "epsilon" => cfg.epsilon = r.float(k, v).unwrap_or(cfg.epsilon),
            "orders" => {
                if let Some(a) = r.array(k, v) {
                    let vals: Vec<Option<usize>> = a.iter().enumerate().map(|(i, x)| r.uint(&format!("orders[{i}]"), x)).collect();
                    if vals.iter().all(Option::is_some) {
                        cfg.orders = vals.into_iter().flatten().map(|o| o.min(255) as u8).collect();
                    }
                }
            }
            "bc_modes" => {
                if let Some(a) = r.array(k, v) {
                    let vals: Vec<Option<BcMode>> =
                        a.iter().enumerate().map(|(i, x)| r.bc_mode(&format!("bc_modes[{i}]"), x)).collect();
                    if vals.iter().all(Option::is_some) {
                        cfg.bc_modes = vals.into_iter().flatten().collect();
                        modes_given = true;
                    }
                }
            }
            "nx" => num.nx = r.uint(k, v).unwrap_or(num.nx),
            "nz" => num.nz = r.uint(k, v).unwrap_or(num.nz),
            "nzb" => num.nzb = r.uint(k, v).unwrap_or(num.nzb),
            "stretch" => num.stretch = r.float(k, v).unwrap_or(num.stretch),
            "dt" => num.dt = r.float(k, v).unwrap_or(num.dt),
            "cadence" => num.cadence = r.float(k, v).unwrap_or(num.cadence),
            "z_max" => num.z_max = r.float(k, v).unwrap_or(num.z_max),
            "output_dir" => {
                if let Some(s) = r.string(k, v) {
                    cfg.output_dir = PathBuf::from(s);
                }
            }
            "emit_remainders" => cfg.emit_remainders = r.boolean(k, v).unwrap_or(cfg.emit_remainders),
            "export_snapshots" => cfg.export_snapshots = r.boolean(k, v).unwrap_or(cfg.export_snapshots),
            _ => r.errors.push(format!("{k}: unknown key")),
        }
    }
    if !modes_given {
        cfg.bc_modes = vec![cfg.scenario.bc_mode()];
    }
    r.errors.extend(cfg.numerics.problems().into_iter().map(|p| p.trim_start_matches("numerics.").to_string()));
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        r.errors.push(format!("epsilon: must be positive (got {})", cfg.epsilon));
    }
    if cfg.orders.is_empty() || cfg.orders.iter().any(|&o| o > 1) {
        r.errors.push(format!("orders: each order must be 0 or 1 (got {:?})", cfg.orders));
    }
    if cfg.bc_modes.is_empty() {
        r.errors.push("bc_modes: at least one wall mode is required".into());
    }
    let (h, c) = (cfg.scenario.horizon, cfg.numerics.cadence);
    if h > 0.0 && c > 0.0 && ((h / c) - (h / c).round()).abs() > 1e-9 {
        r.errors.push(format!("cadence: horizon {h} is not a whole number of intervals {c}"));
    }
    if command == Some(Command::Rates) {
        if let Err(e) = validate_epsilons(&cfg.epsilons) {
            r.errors.push(format!("epsilons: {}", e.to_string().trim_start_matches("precondition failed: ")));
        }
    }
    if r.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(r.errors))
    }
}

/// The documented defaults as a config file.
pub fn defaults_toml() -> String {
    let d = RunConfig::default();
    let n = &d.numerics;
    let p = &d.scenario;
    let eps: Vec<String> = d.epsilons.iter().map(|e| format!("{e:e}")).collect();
    format!(
        "\
# ε list of `rates` (at least 4 values spanning at least 1.5 decades)
epsilons = [{}]
# ε of check, ideal, correctors, assemble and solve
epsilon = {:e}
# expansion orders (0 or 1)
orders = [0]
# wall modes; defaults to the scenario's own mode
bc_modes = [\"{}\"]

# Fourier modes in x (even), channel nodes (odd), tanh clustering in [0,1)
nx = {}
nz = {}
stretch = {}
# time step and snapshot cadence
dt = {:e}
cadence = {}
# half-line grid for the wall layers
z_max = {}
nzb = {}

output_dir = \"{}\"
# assemble: write per-term remainder norms
emit_remainders = false
# solve: write viscous snapshots as t,k,z,re,im
export_snapshots = false

[scenario]
# default-conducting or default-dirichlet
base = \"{}\"
length = {}
horizon = {}
wall_shear = {}
forcing = {}
wall_slip = {}
",
        eps.join(", "),
        d.epsilon,
        d.bc_modes[0],
        n.nx,
        n.nz,
        n.stretch,
        n.dt,
        n.cadence,
        n.z_max,
        n.nzb,
        d.output_dir.display(),
        p.base,
        p.length,
        p.horizon,
        p.wall_shear,
        p.forcing,
        p.wall_slip,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gives_defaults() {
        let c = parse_config("scenario=\"default-conducting\"", None).unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn generated_defaults_round_trip() {
        assert_eq!(parse_config(&defaults_toml(), Some(Command::Rates)).unwrap(), RunConfig::default());
    }

    #[test]
    fn single_epsilon_rejected_for_rates_only() {
        let e = parse_config("epsilons=[1e-2]", Some(Command::Rates)).unwrap_err();
        assert!(e.0.iter().any(|m| m.contains("need ≥4 epsilons")), "{e}");
        assert!(parse_config("epsilons=[1e-2]", Some(Command::Solve)).is_ok());
    }

    #[test]
    fn stretch_constraint_is_named() {
        let e = parse_config("stretch = 1.2", None).unwrap_err();
        assert!(e.0.iter().any(|m| m.contains("stretch") && m.contains("[0,1)")), "{e}");
    }

    #[test]
    fn all_errors_are_collected() {
        let e = parse_config("foo = 1\nnz = \"x\"\nstretch = 2.0\n[scenario]\nbar = 3\n", None).unwrap_err();
        assert_eq!(e.0.len(), 4, "{e}");
        assert!(e.0.iter().any(|m| m == "foo: unknown key"));
        assert!(e.0.iter().any(|m| m == "scenario.bar: unknown key"));
        assert!(e.0.iter().any(|m| m.starts_with("nz: expected a non-negative integer")));
    }

    #[test]
    fn scenario_base_sets_mode() {
        let c = parse_config("[scenario]\nbase = \"default-dirichlet\"\nwall_shear = 0.5", None).unwrap();
        assert_eq!(c.bc_modes, vec![BcMode::Dirichlet]);
        assert_eq!(c.scenario.wall_shear, 0.5);
    }
}
