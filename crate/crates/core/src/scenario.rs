//! Problem data: initial profiles, wall data, forcing and numerical knobs.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{BlGrid, ChannelGrid, Wall};

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Magnetic wall condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcMode {
    /// `∂z H1 = ∂z H2 = 0` at both walls.
    Conducting,
    /// `H = γ^i(t, x)` at the walls.
    Dirichlet,
}

impl BcMode {
    pub fn name(self) -> &'static str {
        match self {
            BcMode::Conducting => "conducting",
            BcMode::Dirichlet => "dirichlet",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "conducting" => Some(BcMode::Conducting),
            "dirichlet" => Some(BcMode::Dirichlet),
            _ => None,
        }
    }
}

impl fmt::Display for BcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretization knobs shared by every solver in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub nx: usize,
    pub nz: usize,
    pub stretch: f64,
    pub dt: f64,
    pub cadence: f64,
    pub z_max: f64,
    pub nzb: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { nx: 16, nz: 2049, stretch: 0.995, dt: 1e-3, cadence: 0.05, z_max: 12.0, nzb: 961 }
    }
}

impl Numerics {
    pub fn channel_grid(&self, length: f64) -> Result<ChannelGrid> {
        ChannelGrid::new(self.nx, self.nz, self.stretch, length)
    }

    pub fn bl_grid(&self) -> Result<BlGrid> {
        BlGrid::new(self.z_max, self.nzb)
    }

    /// Validation messages, empty when the knobs are usable.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.nx < 4 || self.nx % 2 != 0 {
            p.push(format!("numerics.nx must be even and >= 4 (got {})", self.nx));
        }
        if self.nz < 5 || self.nz % 2 == 0 {
            p.push(format!("numerics.nz must be odd and >= 5 (got {})", self.nz));
        }
        if !(0.0..1.0).contains(&self.stretch) {
            p.push(format!("numerics.stretch must lie in [0,1) (got {})", self.stretch));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            p.push(format!("numerics.dt must be positive (got {})", self.dt));
        }
        if !(self.cadence > 0.0 && self.cadence.is_finite()) {
            p.push(format!("numerics.cadence must be positive (got {})", self.cadence));
        } else if self.dt > 0.0 {
            let ratio = self.cadence / self.dt;
            if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
                p.push(format!(
                    "numerics.cadence ({}) must be a whole multiple of numerics.dt ({})",
                    self.cadence, self.dt
                ));
            }
        }
        if self.z_max < 12.0 {
            p.push(format!("numerics.z_max must be >= 12 (got {})", self.z_max));
        }
        if self.nzb < 3 || self.z_max / (self.nzb.max(2) - 1) as f64 > 0.05 + 1e-15 {
            p.push(format!("numerics.nzb gives boundary-layer spacing above 0.05 (nzb = {})", self.nzb));
        }
        p
    }
}

/// Time lattice of a run: `dt` steps from 0 to the horizon with snapshots every `stride` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeLattice {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

impl TimeLattice {
    pub fn new(horizon: f64, dt: f64, cadence: f64) -> Result<Self> {
        if !(dt > 0.0 && horizon > 0.0 && cadence >= dt) {
            return Err(Error::Config(format!("bad time lattice: T={horizon}, dt={dt}, cadence={cadence}")));
        }
        let steps = (horizon / dt).round() as usize;
        let stride = (cadence / dt).round() as usize;
        if (steps as f64 * dt - horizon).abs() > 1e-9 * horizon.max(1.0) || steps % stride != 0 {
            return Err(Error::Config(format!(
                "horizon {horizon} must be a whole number of snapshot intervals {cadence}"
            )));
        }
        Ok(Self { dt, steps, stride })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.steps)
    }

    /// Step indices of the stored snapshots, including `t = 0` and the horizon.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        (0..=self.steps).step_by(self.stride).collect()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshot_steps().into_iter().map(|s| self.time(s)).collect()
    }

    pub fn is_snapshot(&self, step: usize) -> bool {
        step % self.stride == 0
    }
}

/// Named base problem plus the tunable amplitudes of the shipped family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub base: String,
    pub length: f64,
    pub horizon: f64,
    /// Amplitude `κ` of the `sin(2πz)/(2π)` shear part of the axial forcing.
    pub wall_shear: f64,
    /// Overall amplitude of the axial forcing.
    pub forcing: f64,
    /// Offset of the axial wall velocity from the initial profile; nonzero values break compatibility.
    pub wall_slip: f64,
}

impl ScenarioParams {
    pub const BASES: [&'static str; 2] = ["default-conducting", "default-dirichlet"];

    pub fn named(base: &str) -> Result<Self> {
        if !Self::BASES.contains(&base) {
            return Err(Error::Config(format!(
                "unknown scenario '{base}' (expected one of {})",
                Self::BASES.join(", ")
            )));
        }
        Ok(Self { base: base.to_string(), length: 2.0 * PI, horizon: 2.0, wall_shear: 0.0, forcing: 1.0, wall_slip: 0.0 })
    }

    pub fn bc_mode(&self) -> BcMode {
        if self.base == "default-dirichlet" {
            BcMode::Dirichlet
        } else {
            BcMode::Conducting
        }
    }

    pub fn with_mode(&self, mode: BcMode) -> Self {
        let mut p = self.clone();
        p.base = match mode {
            BcMode::Conducting => "default-conducting",
            BcMode::Dirichlet => "default-dirichlet",
        }
        .to_string();
        p
    }

    pub fn build(&self) -> Result<Scenario> {
        Scenario::default_family(self)
    }
}

/// Complete problem data for one run.
///
/// `gamma1`/`gamma2` take `ε` as a trailing argument so that wall ramps can
/// depend on the viscosity.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub length: f64,
    pub horizon: f64,
    pub bc_mode: BcMode,
    pub a: Fn1,
    pub c: Fn1,
    /// `b(x, z)`.
    pub b: Fn2,
    /// `d(x, z)`.
    pub d: Fn2,
    /// `f1(t, z)`.
    pub f1: Fn2,
    /// `f2(t, x, z)`; `None` means identically zero.
    pub f2: Option<Fn3>,
    /// `α1^i(t)`, indexed by wall.
    pub alpha1: [Fn1; 2],
    /// `α2^i(t, x)`.
    pub alpha2: [Fn2; 2],
    /// `γ1^i(t, ε)`.
    pub gamma1: [Fn2; 2],
    /// `γ2^i(t, x, ε)`.
    pub gamma2: [Fn3; 2],
    pub params: Option<ScenarioParams>,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("length", &self.length)
            .field("horizon", &self.horizon)
            .field("bc_mode", &self.bc_mode)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

fn sin3(z: f64) -> f64 {
    (PI * z).sin().powi(3)
}

impl Scenario {
    /// The shipped trigonometric family.
    ///
    /// With `q = 2π/L`:
    /// `a = 2 + sin³(πz)`, `b = sin(qx) sin³(πz)`, `c = 1 + ½cos(πz)`, `d = cos(qx) cos(πz)`,
    /// `f1 = A sin t cos πz + κ sin(2πz)/(2π)`, `f2 = 0`, `α1 = 2`,
    /// `α2 = (1 − e^{−t}) c(i) ∂x d(x, i)`, and in Dirichlet mode
    /// `γ1 = c(i) − ε(π²/2) cos(πi) t e^{−t}`,
    /// `γ2 = d(x,i) + t e^{−t} [a(i) q sin(qx) cos(πi) − ε(q² + π²) cos(qx) cos(πi)]`.
    pub fn default_family(p: &ScenarioParams) -> Result<Scenario> {
        if !ScenarioParams::BASES.contains(&p.base.as_str()) {
            return Err(Error::Config(format!("unknown scenario '{}'", p.base)));
        }
        if !(p.length > 0.0 && p.horizon > 0.0) {
            return Err(Error::Config("scenario length and horizon must be positive".into()));
        }
        let q = 2.0 * PI / p.length;
        let (amp, kappa) = (p.forcing, p.wall_shear);
        let a: Fn1 = Arc::new(|z| 2.0 + sin3(z));
        let c: Fn1 = Arc::new(|z| 1.0 + 0.5 * (PI * z).cos());
        let b: Fn2 = Arc::new(move |x, z| (q * x).sin() * sin3(z));
        let d: Fn2 = Arc::new(move |x, z| (q * x).cos() * (PI * z).cos());
        let f1: Fn2 = Arc::new(move |t, z| amp * t.sin() * (PI * z).cos() + kappa * (2.0 * PI * z).sin() / (2.0 * PI));
        let slip = p.wall_slip;
        let wall_fns = |i: f64| {
            let cos_i = (PI * i).cos();
            let ci = 1.0 + 0.5 * cos_i;
            let ai = 2.0;
            let alpha1: Fn1 = Arc::new(move |_| ai + slip);
            let alpha2: Fn2 = Arc::new(move |t, x| -(1.0 - (-t).exp()) * ci * q * (q * x).sin() * cos_i);
            let gamma1: Fn2 = Arc::new(move |t, eps| ci - eps * 0.5 * PI * PI * cos_i * t * (-t).exp());
            let gamma2: Fn3 = Arc::new(move |t, x, eps| {
                (q * x).cos() * cos_i
                    + t * (-t).exp()
                        * (ai * q * (q * x).sin() * cos_i - eps * (q * q + PI * PI) * (q * x).cos() * cos_i)
            });
            (alpha1, alpha2, gamma1, gamma2)
        };
        let (a1l, a2l, g1l, g2l) = wall_fns(0.0);
        let (a1u, a2u, g1u, g2u) = wall_fns(1.0);
        Ok(Scenario {
            name: p.base.clone(),
            length: p.length,
            horizon: p.horizon,
            bc_mode: p.bc_mode(),
            a,
            c,
            b,
            d,
            f1,
            f2: None,
            alpha1: [a1l, a1u],
            alpha2: [a2l, a2u],
            gamma1: [g1l, g1u],
            gamma2: [g2l, g2u],
            params: Some(p.clone()),
        })
    }

    pub fn default_conducting() -> Scenario {
        ScenarioParams::named("default-conducting").and_then(|p| p.build()).expect("shipped scenario")
    }

    pub fn default_dirichlet() -> Scenario {
        ScenarioParams::named("default-dirichlet").and_then(|p| p.build()).expect("shipped scenario")
    }

    /// Identically zero data on `[0, L] × [0, 1]`, a starting point for custom problems.
    pub fn zero(length: f64, horizon: f64, bc_mode: BcMode) -> Scenario {
        let z1: Fn1 = Arc::new(|_| 0.0);
        let z2: Fn2 = Arc::new(|_, _| 0.0);
        let z3: Fn3 = Arc::new(|_, _, _| 0.0);
        Scenario {
            name: "custom".into(),
            length,
            horizon,
            bc_mode,
            a: z1.clone(),
            c: z1.clone(),
            b: z2.clone(),
            d: z2.clone(),
            f1: z2.clone(),
            f2: None,
            alpha1: [z1.clone(), z1],
            alpha2: [z2.clone(), z2.clone()],
            gamma1: [z2.clone(), z2],
            gamma2: [z3.clone(), z3],
            params: None,
        }
    }

    pub fn with_mode(mut self, mode: BcMode) -> Self {
        self.bc_mode = mode;
        if let Some(p) = &self.params {
            self.params = Some(p.with_mode(mode));
            self.name = self.params.as_ref().map(|p| p.base.clone()).unwrap_or(self.name);
        }
        self
    }

    pub fn alpha1_at(&self, wall: Wall, t: f64) -> f64 {
        (self.alpha1[wall.index()])(t)
    }

    pub fn alpha2_at(&self, wall: Wall, t: f64, x: f64) -> f64 {
        (self.alpha2[wall.index()])(t, x)
    }

    pub fn gamma1_at(&self, wall: Wall, t: f64, eps: f64) -> f64 {
        (self.gamma1[wall.index()])(t, eps)
    }

    pub fn gamma2_at(&self, wall: Wall, t: f64, x: f64, eps: f64) -> f64 {
        (self.gamma2[wall.index()])(t, x, eps)
    }

    pub fn f2_at(&self, t: f64, x: f64, z: f64) -> f64 {
        self.f2.as_ref().map_or(0.0, |f| f(t, x, z))
    }

    pub fn has_f2(&self) -> bool {
        self.f2.is_some()
    }
}
