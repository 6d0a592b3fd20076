//! ε-sweeps: error tables between viscous runs and the approximants, and
//! log-log rate fits against the theoretical exponents.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composer::{AssemblyTerms, ApproxSnapshot, Composer};
use crate::error::{Error, Result};
use crate::fields::{norms, ChannelGrid, FieldRef, ModalField, NormKind, NormTriple, Profile1D};
use crate::ideal::IdealOuter;
use crate::prandtl::{solve_correctors, CorrectorRequest};
use crate::scenario::{BcMode, Numerics, Scenario, TimeLattice};
use crate::viscous::{solve_viscous, ViscousOptions, ViscousRun, ViscousState};

/// Version of the JSON rate report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const SLOPE_TOLERANCE: f64 = 0.12;
pub const IDEAL_TOLERANCE: f64 = 0.05;
pub const MIN_R2: f64 = 0.98;

pub const DEFAULT_EPSILONS: [f64; 5] = [1e-2, 3.16e-3, 1e-3, 3.16e-4, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "approx0")]
    Approx0,
    #[serde(rename = "approx1")]
    Approx1,
    #[serde(rename = "ideal")]
    Ideal,
    /// Outer solution plus leading correctors only.
    #[serde(rename = "ideal+bl")]
    IdealBl,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Approx0, Target::Approx1, Target::Ideal, Target::IdealBl];

    pub fn name(self) -> &'static str {
        match self {
            Target::Approx0 => "approx0",
            Target::Approx1 => "approx1",
            Target::Ideal => "ideal",
            Target::IdealBl => "ideal+bl",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    U1,
    H1,
    U2,
    H2,
    All,
}

impl Component {
    pub const ALL: [Component; 5] = [Component::U1, Component::H1, Component::U2, Component::H2, Component::All];

    pub fn name(self) -> &'static str {
        match self {
            Component::U1 => "u1",
            Component::H1 => "h1",
            Component::U2 => "u2",
            Component::H2 => "h2",
            Component::All => "all",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `sup_t` norms of one error component against one target at one ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub epsilon: f64,
    pub target: Target,
    pub component: Component,
    pub norms: NormTriple,
    pub warnings: Vec<String>,
}

/// Error rows of one `(wall mode, order)` configuration, ordered by decreasing ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub bc_mode: BcMode,
    pub order: u8,
    rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub fn new(bc_mode: BcMode, order: u8) -> Self {
        Self { bc_mode, order, rows: Vec::new() }
    }

    pub fn rows(&self) -> &[ErrorRow] {
        &self.rows
    }

    pub fn epsilons(&self) -> Vec<f64> {
        let mut e: Vec<f64> = Vec::new();
        for r in &self.rows {
            if e.last() != Some(&r.epsilon) {
                e.push(r.epsilon);
            }
        }
        e
    }

    /// Append the rows of one case; its ε must be below every ε already present.
    pub fn push_case(&mut self, rows: Vec<ErrorRow>) -> Result<()> {
        let Some(eps) = rows.first().map(|r| r.epsilon) else {
            return Ok(());
        };
        if rows.iter().any(|r| r.epsilon != eps) {
            return Err(Error::Precondition("case rows carry different epsilons".into()));
        }
        if let Some(last) = self.rows.last() {
            if !(eps < last.epsilon) {
                return Err(Error::Precondition(format!(
                    "epsilons must decrease strictly ({eps} after {})",
                    last.epsilon
                )));
            }
        }
        if let Some(r) = rows.iter().find(|r| !r.norms.is_finite()) {
            return Err(Error::NonFinite(format!("{} error vs {} at eps={}", r.component, r.target, eps)));
        }
        self.rows.extend(rows);
        Ok(())
    }

    pub fn get(&self, epsilon: f64, target: Target, component: Component) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.epsilon == epsilon && r.target == target && r.component == component)
    }

    /// `(ε, value)` pairs for one fitted line.
    pub fn series(&self, target: Target, component: Component, norm: NormKind) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.target == target && r.component == component)
            .map(|r| (r.epsilon, r.norms.get(norm)))
            .collect()
    }

    /// CSV with columns `epsilon,target,component,norm,value,warnings`;
    /// `header` lines are written first, each prefixed by `# `.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            for line in h.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str("epsilon,target,component,norm,value,warnings\n");
        for r in &self.rows {
            for n in NormKind::ALL {
                let w = r.warnings.join("; ").replace('"', "'");
                out.push_str(&format!(
                    "{:e},{},{},{},{:e},\"{}\"\n",
                    r.epsilon,
                    r.target,
                    r.component,
                    n.name(),
                    r.norms.get(n),
                    w
                ));
            }
        }
        out
    }
}

/// Everything produced for one ε.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub epsilon: f64,
    pub viscous: ViscousRun,
    pub rows: Vec<ErrorRow>,
    pub warnings: Vec<String>,
}

fn diff_norms(
    grid: &ChannelGrid,
    v: &ViscousState,
    u1: &Profile1D,
    h1: &Profile1D,
    u2: &ModalField,
    h2: &ModalField,
) -> Result<[NormTriple; 5]> {
    let e1 = v.u1.axpby(1.0, u1, -1.0)?;
    let e3 = v.h1.axpby(1.0, h1, -1.0)?;
    let e2 = v.u2.axpby(1.0, u2, -1.0)?;
    let e4 = v.h2.axpby(1.0, h2, -1.0)?;
    Ok([
        norms(&[FieldRef::Profile(&e1)], grid)?,
        norms(&[FieldRef::Profile(&e3)], grid)?,
        norms(&[FieldRef::Modal(&e2)], grid)?,
        norms(&[FieldRef::Modal(&e4)], grid)?,
        norms(&[FieldRef::Profile(&e1), FieldRef::Profile(&e3), FieldRef::Modal(&e2), FieldRef::Modal(&e4)], grid)?,
    ])
}

fn sup_over(per_snap: Vec<[NormTriple; 5]>) -> [NormTriple; 5] {
    per_snap.into_iter().fold([NormTriple::ZERO; 5], |mut acc, s| {
        for (a, b) in acc.iter_mut().zip(s) {
            *a = a.max(b);
        }
        acc
    })
}

/// Viscous solve, outer solution, correctors and error rows for every target at one ε.
///
/// Errors are formed on the viscous grid at the shared snapshot times;
/// `approx1` rows are present only when `order >= 1`.
pub fn run_case(scenario: &Scenario, epsilon: f64, order: u8, bc_mode: BcMode, num: &Numerics) -> Result<CaseResult> {
    let s = scenario.clone().with_mode(bc_mode);
    let (viscous, _) = solve_viscous(&s, epsilon, num, ViscousOptions { order, energy_audit: false })?;
    let grid = num.channel_grid(s.length)?;
    let bl = num.bl_grid()?;
    let lattice = TimeLattice::new(s.horizon, num.dt, num.cadence)?;
    let outer = IdealOuter::new(&s, &grid)?;
    let req = CorrectorRequest { epsilon, bc_mode, order, record_steps: lattice.snapshot_steps() };
    let corr = solve_correctors(&s, &outer, &bl, &lattice, &req)?;
    let comp = Composer::new(&outer, &corr)?;

    let mut warnings = viscous.warnings.clone();
    warnings.extend(corr.decay_warnings());
    let check_times = |snaps: &[ApproxSnapshot]| -> Result<()> {
        if snaps.len() != viscous.states.len()
            || snaps.iter().zip(&viscous.states).any(|(a, v)| (a.time - v.time).abs() > 1e-12)
        {
            return Err(Error::Dimension("approximant and viscous snapshots differ".into()));
        }
        Ok(())
    };

    let mut targets: Vec<(Target, [NormTriple; 5])> = Vec::new();
    let assemble_errors = |ord: u8, terms: AssemblyTerms| -> Result<[NormTriple; 5]> {
        let approx = comp.assemble(ord, terms)?;
        let snaps: Vec<ApproxSnapshot> = approx.snapshots().cloned().collect();
        check_times(&snaps)?;
        let per = snaps
            .par_iter()
            .zip(viscous.states.par_iter())
            .map(|(a, v)| diff_norms(&grid, v, &a.u1, &a.h1, &a.u2, &a.h2))
            .collect::<Result<Vec<_>>>()?;
        Ok(sup_over(per))
    };
    targets.push((Target::Approx0, assemble_errors(0, AssemblyTerms::full(bc_mode, 0))?));
    if order >= 1 {
        targets.push((Target::Approx1, assemble_errors(1, AssemblyTerms::full(bc_mode, 1))?));
    }
    let ideal = viscous
        .states
        .par_iter()
        .map(|v| {
            let o = outer.at(v.time)?;
            diff_norms(&grid, v, &o.u1, &o.h1, &o.u2, &o.h2)
        })
        .collect::<Result<Vec<_>>>()?;
    targets.push((Target::Ideal, sup_over(ideal)));
    targets.push((Target::IdealBl, assemble_errors(0, AssemblyTerms::COMPOSITE)?));
    targets.sort_by_key(|t| t.0);

    let mut rows = Vec::new();
    for (target, n) in targets {
        for (c, norms) in Component::ALL.into_iter().zip(n) {
            rows.push(ErrorRow { epsilon, target, component: c, norms, warnings: warnings.clone() });
        }
    }
    Ok(CaseResult { epsilon, viscous, rows, warnings })
}

/// Ordinary least squares of `ln err` against `ln ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    pub excluded: usize,
}

/// Fit `ln err = slope·ln ε + intercept`. Non-positive errors are skipped and counted.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, v)| *e > 0.0 && *v > 0.0 && v.is_finite())
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    let excluded = points.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::Precondition(format!(
            "rate fit needs at least 3 positive errors (got {}, {excluded} excluded)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("rate fit needs at least two distinct epsilons".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(RateFit { slope, intercept, r2, used: pts.len(), excluded })
}

/// Theoretical exponent and slope tolerance of a gated line.
pub fn theory(target: Target, component: Component, norm: NormKind) -> Option<(f64, f64)> {
    use Component as C;
    use NormKind as N;
    use Target as T;
    let t = SLOPE_TOLERANCE;
    match (target, component, norm) {
        (T::Approx0, C::All, N::L2) => Some((0.75, t)),
        (T::Approx0, C::All, N::H1) => Some((0.25, t)),
        (T::Approx0, C::All, N::Linf) => Some((0.5, t)),
        (T::Approx0, C::U1 | C::H1, N::L2) => Some((1.0, t)),
        (T::Approx0, C::U1 | C::H1, N::H1) => Some((0.5, t)),
        (T::Approx0, C::U1 | C::H1, N::Linf) => Some((0.75, t)),
        (T::Ideal, C::All, N::L2) => Some((0.25, IDEAL_TOLERANCE)),
        (T::Approx1, C::All, N::H1) => Some((0.5, t)),
        (T::Approx1, C::All, N::Linf) => Some((0.75, t)),
        (T::IdealBl, C::All, N::H1) => Some((0.5, t)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEntry {
    pub target: Target,
    pub component: Component,
    pub norm: NormKind,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub theory: Option<f64>,
    pub tolerance: Option<f64>,
    /// `None` for lines without a theoretical exponent.
    pub pass: Option<bool>,
    pub points: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RateEntry {
    /// Two-column gnuplot data with the fit in the header.
    pub fn gnuplot(&self) -> String {
        let mut s = format!(
            "# {} {} {}: slope {:.6} intercept {:.6} r2 {:.6}",
            self.target,
            self.component,
            self.norm.name(),
            self.slope,
            self.intercept,
            self.r2
        );
        if let Some(th) = self.theory {
            s.push_str(&format!(" theory {th}"));
        }
        s.push_str("\n# epsilon error\n");
        for (e, v) in &self.points {
            s.push_str(&format!("{e:e} {v:e}\n"));
        }
        s
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}_{}", self.target.name().replace('+', "_"), self.component, self.norm.name())
    }
}

/// A named property of a sweep that is not a single fitted line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub schema_version: u32,
    pub scenario: String,
    pub bc_mode: BcMode,
    pub order: u8,
    pub epsilons: Vec<f64>,
    pub entries: Vec<RateEntry>,
    pub checks: Vec<SweepCheck>,
    /// Every gated entry passes.
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl RateReport {
    pub fn entry(&self, target: Target, component: Component, norm: NormKind) -> Option<&RateEntry> {
        self.entries.iter().find(|e| e.target == target && e.component == component && e.norm == norm)
    }

    pub fn failures(&self) -> Vec<&RateEntry> {
        self.entries.iter().filter(|e| e.pass == Some(false)).collect()
    }
}

/// Fit every `(target, component, norm)` line present in the table.
pub fn rate_report(scenario: &str, table: &ErrorTable) -> RateReport {
    let mut entries = Vec::new();
    for target in Target::ALL {
        for component in Component::ALL {
            for norm in NormKind::ALL {
                let points = table.series(target, component, norm);
                if points.is_empty() {
                    continue;
                }
                let th = theory(target, component, norm);
                let (fit, note) = match fit_rate(&points) {
                    Ok(f) => {
                        let note = (f.excluded > 0).then(|| format!("{} zero errors excluded", f.excluded));
                        (Some(f), note)
                    }
                    Err(e) => (None, Some(e.to_string())),
                };
                let pass = th.map(|(t, tol)| fit.is_some_and(|f| (f.slope - t).abs() <= tol && f.r2 >= MIN_R2));
                entries.push(RateEntry {
                    target,
                    component,
                    norm,
                    slope: fit.map_or(f64::NAN, |f| f.slope),
                    intercept: fit.map_or(f64::NAN, |f| f.intercept),
                    r2: fit.map_or(f64::NAN, |f| f.r2),
                    theory: th.map(|t| t.0),
                    tolerance: th.map(|t| t.1),
                    pass,
                    points,
                    note,
                });
            }
        }
    }
    let checks = sweep_checks(table, &entries);
    let passed = entries.iter().all(|e| e.pass != Some(false));
    RateReport {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.to_string(),
        bc_mode: table.bc_mode,
        order: table.order,
        epsilons: table.epsilons(),
        entries,
        checks,
        passed,
        config: None,
    }
}

fn sweep_checks(table: &ErrorTable, entries: &[RateEntry]) -> Vec<SweepCheck> {
    let mut out = Vec::new();
    let eps = table.epsilons();
    let val = |e: f64, t: Target, n: NormKind| table.get(e, t, Component::All).map(|r| r.norms.get(n));
    let mut bad = Vec::new();
    for &e in &eps {
        if let (Some(a), Some(i)) = (val(e, Target::Approx0, NormKind::L2), val(e, Target::Ideal, NormKind::L2)) {
            if !(a <= i) {
                bad.push(format!("eps={e:e}: {a:.3e} > {i:.3e}"));
            }
        }
    }
    out.push(SweepCheck {
        name: "corrected L2 error below uncorrected".into(),
        pass: bad.is_empty(),
        detail: if bad.is_empty() { format!("{} epsilons", eps.len()) } else { bad.join("; ") },
    });
    if table.order >= 1 {
        let mut bad = Vec::new();
        for (i, &e) in eps.iter().enumerate() {
            if let (Some(a1), Some(a0)) = (val(e, Target::Approx1, NormKind::H1), val(e, Target::Approx0, NormKind::H1)) {
                let strict = i + 2 >= eps.len();
                if a1 > 1.05 * a0 || (strict && !(a1 < a0)) {
                    bad.push(format!("eps={e:e}: {a1:.3e} vs {a0:.3e}"));
                }
            }
        }
        out.push(SweepCheck {
            name: "first-order H1 error not worse".into(),
            pass: bad.is_empty(),
            detail: if bad.is_empty() { "within 5%, strict at the two smallest epsilons".into() } else { bad.join("; ") },
        });
    }
    let slope = |n: NormKind| {
        entries
            .iter()
            .find(|e| e.target == Target::Approx0 && e.component == Component::All && e.norm == n)
            .map(|e| e.slope)
    };
    if let (Some(l2), Some(h1), Some(li)) = (slope(NormKind::L2), slope(NormKind::H1), slope(NormKind::Linf)) {
        out.push(SweepCheck {
            name: "slope ordering l2 > linf > h1".into(),
            pass: l2 > li && li > h1,
            detail: format!("{l2:.3} / {li:.3} / {h1:.3}"),
        });
    }
    out
}

/// Check the ε list of a sweep and return it sorted in decreasing order.
pub fn validate_epsilons(epsilons: &[f64]) -> Result<Vec<f64>> {
    if epsilons.len() < 4 {
        return Err(Error::Precondition(format!("need ≥4 epsilons for a rate sweep (got {})", epsilons.len())));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Precondition(format!("epsilons must be positive (got {e})")));
    }
    let mut e = epsilons.to_vec();
    e.sort_by(|a, b| b.total_cmp(a));
    if e.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("epsilons must be distinct".into()));
    }
    let span = (e[0] / e[e.len() - 1]).log10();
    if span < 1.5 - 1e-9 {
        return Err(Error::Precondition(format!("epsilons must span ≥1.5 decades (got {span:.2})")));
    }
    Ok(e)
}

/// One `(wall mode, order)` block of a sweep.
#[derive(Debug, Clone)]
pub struct SweepBlock {
    pub table: ErrorTable,
    pub report: RateReport,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub blocks: Vec<SweepBlock>,
}

impl ConvergenceReport {
    pub fn block(&self, bc_mode: BcMode, order: u8) -> Option<&SweepBlock> {
        self.blocks.iter().find(|b| b.table.bc_mode == bc_mode && b.table.order == order)
    }

    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.report.passed)
    }
}

/// A sweep that stopped on a failing case, with every table completed so far.
#[derive(Debug, Clone)]
pub struct SweepFailure {
    pub error: Error,
    pub partial: Vec<ErrorTable>,
}

impl fmt::Display for SweepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} partial tables)", self.error, self.partial.len())
    }
}

/// Run every ε for every `(order, wall mode)` pair; cases run in parallel and
/// merge in decreasing ε.
pub fn sweep(
    scenario: &Scenario,
    epsilons: &[f64],
    orders: &[u8],
    bc_modes: &[BcMode],
    num: &Numerics,
) -> std::result::Result<ConvergenceReport, SweepFailure> {
    let eps = validate_epsilons(epsilons).map_err(|error| SweepFailure { error, partial: Vec::new() })?;
    let mut blocks = Vec::new();
    let mut partial: Vec<ErrorTable> = Vec::new();
    for &bc in bc_modes {
        for &order in orders {
            let cases: Vec<Result<CaseResult>> = eps.par_iter().map(|&e| run_case(scenario, e, order, bc, num)).collect();
            let mut table = ErrorTable::new(bc, order);
            for c in cases {
                let pushed = c.and_then(|c| {
                    log::info!("{bc} order {order} eps={:e} done", c.epsilon);
                    table.push_case(c.rows)
                });
                if let Err(error) = pushed {
                    partial.push(table);
                    return Err(SweepFailure { error, partial });
                }
            }
            let report = rate_report(&scenario.name, &table);
            partial.push(table.clone());
            blocks.push(SweepBlock { table, report });
        }
    }
    Ok(ConvergenceReport { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fits_exactly() {
        let pts: Vec<(f64, f64)> = DEFAULT_EPSILONS.iter().map(|&e| (e, e.powf(0.75))).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope - 0.75).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = DEFAULT_EPSILONS.iter().map(|&e| (e, 3.0 * e)).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn oscillating_power_law_stays_near_slope() {
        let pts: Vec<(f64, f64)> = DEFAULT_EPSILONS.iter().map(|&e| (e, e.powf(0.75) * (1.0 + 0.1 * e.ln().sin()))).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope - 0.75).abs() <= 0.1, "slope {}", f.slope);
    }

    #[test]
    fn zero_errors_are_excluded_and_short_series_rejected() {
        let pts = [(1e-2, 0.0), (1e-3, 1e-3), (1e-4, 1e-4), (1e-5, 1e-5)];
        let f = fit_rate(&pts).unwrap();
        assert_eq!((f.used, f.excluded), (3, 1));
        assert!(fit_rate(&pts[..3]).is_err());
    }

    #[test]
    fn epsilon_list_preconditions() {
        assert!(validate_epsilons(&[1e-2]).unwrap_err().to_string().contains("need ≥4 epsilons"));
        assert!(validate_epsilons(&[1e-2, 9e-3, 8e-3, 7e-3]).is_err());
        assert_eq!(validate_epsilons(&[1e-4, 1e-2, 1e-3, 3.16e-4]).unwrap()[0], 1e-2);
    }

    #[test]
    fn table_rejects_non_decreasing_epsilon() {
        let row = |e: f64| ErrorRow {
            epsilon: e,
            target: Target::Ideal,
            component: Component::All,
            norms: NormTriple { l2: 1.0, h1: 1.0, linf: 1.0 },
            warnings: vec![],
        };
        let mut t = ErrorTable::new(BcMode::Conducting, 0);
        t.push_case(vec![row(1e-2)]).unwrap();
        assert!(t.push_case(vec![row(1e-2)]).is_err());
        t.push_case(vec![row(1e-3)]).unwrap();
        assert_eq!(t.epsilons(), vec![1e-2, 1e-3]);
        assert!(t.to_csv(&["x".into()]).starts_with("# x\nepsilon,target,component,norm,value,warnings\n"));
    }

    #[test]
    fn gate_requires_slope_and_r2() {
        let mut t = ErrorTable::new(BcMode::Conducting, 0);
        for &e in &DEFAULT_EPSILONS {
            t.push_case(vec![ErrorRow {
                epsilon: e,
                target: Target::Approx0,
                component: Component::All,
                norms: NormTriple { l2: e.powf(0.75), h1: e.powf(0.6), linf: e.powf(0.5) * (1.0 + 0.8 * (3.0 * e.ln()).sin()) },
                warnings: vec![],
            }])
            .unwrap();
        }
        let r = rate_report("synthetic", &t);
        assert_eq!(r.entry(Target::Approx0, Component::All, NormKind::L2).unwrap().pass, Some(true));
        assert_eq!(r.entry(Target::Approx0, Component::All, NormKind::H1).unwrap().pass, Some(false));
        let li = r.entry(Target::Approx0, Component::All, NormKind::Linf).unwrap();
        assert!(li.r2 < MIN_R2 && li.pass == Some(false));
        assert!(!r.passed);
    }
}
