//! The three test problems: a smooth two-stream convergence case, a Sod
//! shock tube and a mixing-regime problem with a variable Knudsen number.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use exprk_core::phase_space::{
    cell_moments, maxwellian, maxwellian_cell, Boundary, EpsilonField, MacroState, PhaseField, SpatialGrid,
    VelocityGrid,
};

use crate::{HarnessError, HarnessResult};

/// Floor of the mixing-regime Knudsen profile.
pub const MIXING_EPS0: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    SmoothConvergence,
    Sod,
    MixingRegime,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] = [Self::SmoothConvergence, Self::Sod, Self::MixingRegime];

    pub fn name(self) -> &'static str {
        match self {
            Self::SmoothConvergence => "smooth",
            Self::Sod => "sod",
            Self::MixingRegime => "mixing",
        }
    }

    pub fn boundary(self) -> Boundary {
        match self {
            Self::Sod => Boundary::ZeroGradient,
            _ => Boundary::Periodic,
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            Self::SmoothConvergence => (0.0, 1.0),
            _ => (-0.5, 0.5),
        }
    }

    pub fn default_t_final(self) -> f64 {
        match self {
            Self::SmoothConvergence => 0.1,
            Self::Sod => 0.2,
            Self::MixingRegime => 0.25,
        }
    }

    /// Knudsen number used when none is given (the floor for mixing).
    pub fn default_eps(self) -> f64 {
        match self {
            Self::SmoothConvergence => 1.0,
            Self::Sod => 1e-6,
            Self::MixingRegime => MIXING_EPS0,
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioName {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "smooth" | "smoothconvergence" | "convergence" => Ok(Self::SmoothConvergence),
            "sod" => Ok(Self::Sod),
            "mixing" | "mixingregime" => Ok(Self::MixingRegime),
            _ => Err(HarnessError::Config(format!(
                "unknown scenario `{s}` (expected smooth, sod or mixing)"
            ))),
        }
    }
}

/// Initial data of the smooth problem: the two-stream sum, or the local
/// Maxwellian carrying the same moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    NonMaxwellian,
    Maxwellian,
}

impl InitialData {
    pub fn name(self) -> &'static str {
        match self {
            Self::NonMaxwellian => "two-stream",
            Self::Maxwellian => "maxwellian",
        }
    }
}

impl FromStr for InitialData {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two-stream" | "twostream" | "non-maxwellian" | "nonmaxwellian" => Ok(Self::NonMaxwellian),
            "maxwellian" | "equilibrium" => Ok(Self::Maxwellian),
            _ => Err(HarnessError::Config(format!(
                "unknown initial data `{s}` (expected two-stream or maxwellian)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsSpec {
    Constant(f64),
    Mixing { eps0: f64 },
}

impl EpsSpec {
    pub fn at(&self, x: f64) -> f64 {
        match *self {
            Self::Constant(e) => e,
            Self::Mixing { eps0 } => mixing_eps(x, eps0),
        }
    }

    pub fn field(&self, sg: &SpatialGrid) -> HarnessResult<EpsilonField> {
        Ok(EpsilonField::new(sg.centers().into_iter().map(|x| self.at(x)).collect())?)
    }
}

pub fn mixing_eps(x: f64, eps0: f64) -> f64 {
    if x < 0.2 {
        eps0 + 0.5 * ((6.0 - 20.0 * x).tanh() + (6.0 + 20.0 * x).tanh())
    } else {
        eps0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub nx: usize,
    pub nv: usize,
    pub cutoff: f64,
    /// Constant Knudsen number, or the floor of the mixing profile.
    pub eps: Option<f64>,
    pub initial: InitialData,
    pub t_final: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            nx: 64,
            nv: 32,
            cutoff: 8.0,
            eps: None,
            initial: InitialData::NonMaxwellian,
            t_final: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: ScenarioName,
    pub spatial: SpatialGrid,
    pub velocity: VelocityGrid,
    pub eps_spec: EpsSpec,
    pub initial: PhaseField,
    pub t_final: f64,
}

impl Scenario {
    pub fn boundary(&self) -> Boundary {
        self.spatial.boundary()
    }

    pub fn eps_field(&self) -> HarnessResult<EpsilonField> {
        self.eps_spec.field(&self.spatial)
    }
}

pub fn build_scenario(name: ScenarioName, p: &ScenarioParams) -> HarnessResult<Scenario> {
    if p.nx == 0 {
        return Err(HarnessError::Config("nx must be positive".into()));
    }
    if let Some(e) = p.eps {
        if !(e.is_finite() && e > 0.0) {
            return Err(HarnessError::Config(format!("eps must be positive, got {e}")));
        }
    }
    let t_final = p.t_final.unwrap_or(name.default_t_final());
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(HarnessError::Config(format!("final time must be >= 0, got {t_final}")));
    }
    let (a, b) = name.domain();
    let sg = SpatialGrid::new(p.nx, a, b, name.boundary())?;
    let vg = VelocityGrid::new(p.nv, p.cutoff)?;
    let eps = p.eps.unwrap_or(name.default_eps());
    let (eps_spec, initial) = match name {
        ScenarioName::SmoothConvergence => {
            let f = match p.initial {
                InitialData::NonMaxwellian => cell_averaged(sg, vg, |x, out| sample(&vg, x, two_stream, out)),
                InitialData::Maxwellian => cell_averaged(sg, vg, |x, out| {
                    sample(&vg, x, two_stream, out);
                    let [rho, mx, my, e] = cell_moments(&vg, out);
                    let u = [mx / rho, my / rho];
                    let t = (e - 0.5 * rho * (u[0] * u[0] + u[1] * u[1])) / rho;
                    maxwellian_cell(&vg, rho, u, t, out);
                }),
            };
            (EpsSpec::Constant(eps), f)
        }
        ScenarioName::Sod => {
            let mut m = MacroState::zeros(p.nx);
            for (i, x) in sg.centers().into_iter().enumerate() {
                if x < 0.0 {
                    m.set_primitive(i, 1.0, [0.0, 0.0], 1.0);
                } else {
                    m.set_primitive(i, 0.125, [0.0, 0.0], 0.25);
                }
            }
            (EpsSpec::Constant(eps), maxwellian(&m, &sg, &vg)?)
        }
        ScenarioName::MixingRegime => (
            EpsSpec::Mixing { eps0: eps },
            cell_averaged(sg, vg, |x, out| sample(&vg, x, mixing_initial, out)),
        ),
    };
    Ok(Scenario {
        name,
        spatial: sg,
        velocity: vg,
        eps_spec,
        initial,
        t_final,
    })
}

// 5-point Gauss-Legendre nodes and weights on [-1, 1]
const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Cell averages of a smooth profile; `profile(x, out)` fills the velocity
/// values at position `x`. The transport schemes and the restriction in the
/// convergence study both read cell values as averages, so point samples
/// would put an O(dx^2) error into the data.
fn cell_averaged(sg: SpatialGrid, vg: VelocityGrid, mut profile: impl FnMut(f64, &mut [f64])) -> PhaseField {
    let mut field = PhaseField::zeros(sg, vg);
    let mut buf = vec![0.0; vg.len()];
    let half = 0.5 * sg.spacing();
    for i in 0..sg.n_cells() {
        let xc = sg.center(i);
        let cell = field.cell_mut(i);
        for (xi, w) in GAUSS5 {
            profile(xc + half * xi, &mut buf);
            for (c, b) in cell.iter_mut().zip(&buf) {
                *c += 0.5 * w * b;
            }
        }
    }
    field
}

fn sample(vg: &VelocityGrid, x: f64, g: fn(f64, f64, f64) -> f64, out: &mut [f64]) {
    for (node, o) in out.iter_mut().enumerate() {
        let (kx, ky) = vg.split(node);
        *o = g(x, vg.coord(kx), vg.coord(ky));
    }
}

fn two_stream(x: f64, vx: f64, vy: f64) -> f64 {
    let rho0 = 0.5 * (2.0 + (2.0 * PI * x).sin());
    let t0 = (5.0 + 2.0 * (2.0 * PI * x).cos()) / 20.0;
    let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / t0).exp();
    0.5 * rho0 * (g(0.75, -0.75) + g(-0.75, 0.75))
}

fn mixing_initial(x: f64, vx: f64, vy: f64) -> f64 {
    let phase = 2.0 * PI * x + PI;
    let rho0 = (2.0 + phase.sin()) / 3.0;
    let u0 = phase.cos() / 5.0;
    let t0 = (3.0 + phase.cos()) / 4.0;
    let g = |ux: f64| (-((vx - ux).powi(2) + vy * vy) / (2.0 * t0)).exp();
    rho0 / (4.0 * PI * t0) * (g(u0) + g(-u0))
}
