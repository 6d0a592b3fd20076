use std::sync::Arc;

use mhd_bl::lab::*;
use mhd_bl::scenario::{BcMode, Numerics, Scenario};

fn small() -> Numerics {
    Numerics { nx: 8, nz: 257, dt: 5e-3, cadence: 0.1, nzb: 481, ..Numerics::default() }
}

fn short(s: Scenario) -> Scenario {
    Scenario { horizon: 0.4, ..s }
}

#[test]
fn cases_are_deterministic() {
    let s = short(Scenario::default_conducting());
    let a = run_case(&s, 1e-2, 0, BcMode::Conducting, &small()).unwrap();
    let b = run_case(&s, 1e-2, 0, BcMode::Conducting, &small()).unwrap();
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.norms, y.norms);
    }
}

#[test]
fn zero_mismatch_matches_ideal_error() {
    let mut s = short(Scenario::default_conducting());
    s.alpha2 = [Arc::new(|_, _| 0.0), Arc::new(|_, _| 0.0)];
    s.b = Arc::new(|_, _| 0.0);
    s.d = Arc::new(|_, _| 0.0);
    s.f1 = Arc::new(|_, _| 0.0);
    let case = run_case(&s, 1e-2, 0, BcMode::Conducting, &small()).unwrap();
    for c in Component::ALL {
        let row = |t| case.rows.iter().find(|r| r.target == t && r.component == c).unwrap().norms;
        let (a, i) = (row(Target::Approx0), row(Target::Ideal));
        assert!((a.l2 - i.l2).abs() <= 1e-8 * i.l2.max(1e-300), "{c:?}: {a:?} vs {i:?}");
        assert!((a.h1 - i.h1).abs() <= 1e-8 * i.h1.max(1e-300));
    }
    let u1 = case.rows.iter().find(|r| r.target == Target::Ideal && r.component == Component::U1).unwrap();
    assert!(u1.norms.l2 > 0.0);
}

#[test]
fn order_one_adds_approx1_rows() {
    let s = short(Scenario::default_dirichlet());
    let case = run_case(&s, 1e-2, 1, BcMode::Dirichlet, &small()).unwrap();
    let targets: Vec<Target> = case.rows.iter().map(|r| r.target).collect();
    for t in Target::ALL {
        assert_eq!(targets.iter().filter(|&&x| x == t).count(), Component::ALL.len());
    }
    assert!(case.rows.iter().all(|r| r.norms.is_finite()));
}

#[test]
fn report_of_synthetic_table_passes_its_gates() {
    let mut table = ErrorTable::new(BcMode::Conducting, 0);
    for &e in &DEFAULT_EPSILONS {
        let mut rows = Vec::new();
        for t in [Target::Approx0, Target::Ideal, Target::IdealBl] {
            for c in Component::ALL {
                let (p2, p1, pi) = match (t, c) {
                    (Target::Ideal, _) => (0.25, -0.25, 0.0),
                    (_, Component::U1 | Component::H1) => (1.0, 0.5, 0.75),
                    (Target::IdealBl, _) => (0.75, 0.5, 0.5),
                    _ => (0.75, 0.25, 0.5),
                };
                let norms = mhd_bl::fields::NormTriple { l2: e.powf(p2), h1: e.powf(p1), linf: e.powf(pi) };
                rows.push(ErrorRow { epsilon: e, target: t, component: c, norms, warnings: vec![] });
            }
        }
        table.push_case(rows).unwrap();
    }
    let report = rate_report("synthetic", &table);
    assert!(report.passed, "{:?}", report.failures());
    assert_eq!(report.schema_version, SCHEMA_VERSION);
    let e = report.entry(Target::Approx0, Component::All, mhd_bl::fields::NormKind::H1).unwrap();
    assert!((e.slope - 0.25).abs() < 1e-12);
}

#[test]
fn sweep_rejects_short_epsilon_lists() {
    let s = Scenario::default_conducting();
    let err = sweep(&s, &[1e-2, 1e-3], &[0], &[BcMode::Conducting], &small()).unwrap_err();
    assert!(err.error.to_string().contains("need ≥4 epsilons"), "{}", err.error);
}
