//! Run configuration and its `key = value` file format.
//!
//! One key per line, `#` starts a comment. Explicit tableaus use
//! `tableau_a` (rows separated by `;`, entries by `,`), `tableau_b` and
//! `tableau_c`. The sidecar written next to every output uses the same
//! format, so a run can be repeated from it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use exprk_core::collision::{CollisionOperator, DirectSumMaxwell, SpectralMaxwell, DEFAULT_MU_SAFETY};
use exprk_core::integrators::Scheme;
use exprk_core::phase_space::VelocityGrid;
use exprk_core::tableau::{BuiltinTableau, Tableau};
use exprk_core::transport::TransportOrder;

use crate::scenario::{InitialData, ScenarioName, ScenarioParams};
use crate::{HarnessError, HarnessResult};

#[derive(Debug, Clone, PartialEq)]
pub enum TableauSpec {
    Builtin(BuiltinTableau),
    Explicit { a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64> },
}

impl TableauSpec {
    pub fn tableau(&self) -> HarnessResult<Tableau> {
        match self {
            Self::Builtin(t) => Ok(t.tableau()),
            Self::Explicit { a, b, c } => Ok(Tableau::new("explicit", a.clone(), b.clone(), c.clone())?),
        }
    }

    /// Nominal order: the builtin order, or the stage count for explicit
    /// arrays.
    pub fn order(&self) -> usize {
        match self {
            Self::Builtin(t) => t.order(),
            Self::Explicit { b, .. } => b.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionKind {
    Bgk,
    Spectral,
    DirectSum,
}

impl CollisionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bgk => "bgk",
            Self::Spectral => "spectral",
            Self::DirectSum => "direct",
        }
    }

    /// BGK relaxation frequency and Maxwell kernel constant are both 1.
    pub fn build(self, vg: &VelocityGrid) -> HarnessResult<CollisionOperator> {
        Ok(match self {
            Self::Bgk => CollisionOperator::bgk(1.0)?,
            Self::Spectral => CollisionOperator::SpectralMaxwell(SpectralMaxwell::new(1.0, vg)?),
            Self::DirectSum => CollisionOperator::DirectSumMaxwell(DirectSumMaxwell::resolved(1.0, vg)?),
        })
    }
}

impl FromStr for CollisionKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bgk" => Ok(Self::Bgk),
            "spectral" | "boltzmann" | "maxwell" => Ok(Self::Spectral),
            "direct" | "direct-sum" | "directsum" => Ok(Self::DirectSum),
            _ => Err(HarnessError::Config(format!(
                "unknown collision operator `{s}` (expected bgk, spectral or direct)"
            ))),
        }
    }
}

/// Default transport order: Weno3 up to second order, Weno5 above.
pub fn default_weno(tableau_order: usize) -> TransportOrder {
    if tableau_order <= 2 {
        TransportOrder::Weno3
    } else {
        TransportOrder::Weno5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioName,
    pub initial: InitialData,
    pub scheme: Scheme,
    pub tableau: TableauSpec,
    pub collision: CollisionKind,
    pub weno: TransportOrder,
    pub nx: usize,
    pub nv: usize,
    pub cutoff: f64,
    pub cfl: f64,
    pub mu_safety: f64,
    pub eps: Option<f64>,
    pub t_final: Option<f64>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn scenario_params(&self) -> ScenarioParams {
        ScenarioParams {
            nx: self.nx,
            nv: self.nv,
            cutoff: self.cutoff,
            eps: self.eps,
            initial: self.initial,
            t_final: self.t_final,
        }
    }

    pub fn validate(&self) -> HarnessResult<()> {
        if self.nx == 0 {
            return Err(HarnessError::Config("nx must be positive".into()));
        }
        if self.nv < 2 {
            return Err(HarnessError::Config(format!("nv must be at least 2, got {}", self.nv)));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(HarnessError::Config(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(HarnessError::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.mu_safety.is_finite() && self.mu_safety >= 1.0) {
            return Err(HarnessError::Config(format!("mu_safety must be >= 1, got {}", self.mu_safety)));
        }
        if let Some(e) = self.eps {
            if !(e.is_finite() && e > 0.0) {
                return Err(HarnessError::Config(format!("eps must be positive, got {e}")));
            }
        }
        if let Some(t) = self.t_final {
            if !(t.is_finite() && t >= 0.0) {
                return Err(HarnessError::Config(format!("tfinal must be >= 0, got {t}")));
            }
        }
        self.tableau.tableau()?;
        Ok(())
    }

    /// Echo in the config-file format.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("scenario", self.scenario.name().into());
        line("initial", self.initial.name().into());
        line("scheme", self.scheme.name().into());
        match &self.tableau {
            TableauSpec::Builtin(t) => line("tableau", t.name().into()),
            TableauSpec::Explicit { a, b, c } => {
                let rows: Vec<String> = a.iter().map(|r| join(r)).collect();
                line("tableau_a", rows.join("; "));
                line("tableau_b", join(b));
                line("tableau_c", join(c));
            }
        }
        line("collision", self.collision.name().into());
        line("weno", self.weno.name().into());
        line("nx", self.nx.to_string());
        line("nv", self.nv.to_string());
        line("cutoff", format!("{:?}", self.cutoff));
        line("cfl", format!("{:?}", self.cfl));
        line("mu_safety", format!("{:?}", self.mu_safety));
        if let Some(e) = self.eps {
            line("eps", format!("{e:?}"));
        }
        if let Some(t) = self.t_final {
            line("tfinal", format!("{t:?}"));
        }
        line("out", self.out.display().to_string());
        s
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Settings before defaults are applied. Flags and file entries both land
/// here; flags are merged last.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub scenario: Option<ScenarioName>,
    pub initial: Option<InitialData>,
    pub scheme: Option<Scheme>,
    pub tableau: Option<BuiltinTableau>,
    pub tableau_a: Option<Vec<Vec<f64>>>,
    pub tableau_b: Option<Vec<f64>>,
    pub tableau_c: Option<Vec<f64>>,
    pub collision: Option<CollisionKind>,
    pub weno: Option<TransportOrder>,
    pub nx: Option<usize>,
    pub nv: Option<usize>,
    pub cutoff: Option<f64>,
    pub cfl: Option<f64>,
    pub mu_safety: Option<f64>,
    pub eps: Option<f64>,
    pub t_final: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> HarnessResult<T> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> HarnessResult<Vec<f64>> {
    v.split(',').map(|x| parse_num(key, x)).collect()
}

impl PartialConfig {
    pub fn set(&mut self, key: &str, value: &str) -> HarnessResult<()> {
        let v = value.trim();
        match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "scenario" => self.scenario = Some(v.parse()?),
            "initial" => self.initial = Some(v.parse()?),
            "scheme" => self.scheme = Some(v.parse()?),
            "tableau" => self.tableau = Some(v.parse()?),
            "tableau_a" => {
                self.tableau_a = Some(v.split(';').map(|row| parse_list(key, row)).collect::<HarnessResult<_>>()?)
            }
            "tableau_b" => self.tableau_b = Some(parse_list(key, v)?),
            "tableau_c" => self.tableau_c = Some(parse_list(key, v)?),
            "collision" => self.collision = Some(v.parse()?),
            "weno" => self.weno = Some(v.parse()?),
            "nx" => self.nx = Some(parse_num(key, v)?),
            "nv" => self.nv = Some(parse_num(key, v)?),
            "cutoff" => self.cutoff = Some(parse_num(key, v)?),
            "cfl" => self.cfl = Some(parse_num(key, v)?),
            "mu_safety" => self.mu_safety = Some(parse_num(key, v)?),
            "eps" => self.eps = Some(parse_num(key, v)?),
            "tfinal" | "t_final" => self.t_final = Some(parse_num(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(HarnessError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> HarnessResult<Self> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", k + 1)))?;
            cfg.set(key, value)
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", k + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `other` win.
    pub fn merge(mut self, other: PartialConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            scenario, initial, scheme, tableau, tableau_a, tableau_b, tableau_c, collision, weno, nx, nv, cutoff,
            cfl, mu_safety, eps, t_final, out
        );
        self
    }

    /// Applies defaults. `scenario` and `scheme` are required.
    pub fn finish(self) -> HarnessResult<RunConfig> {
        let scenario = self
            .scenario
            .ok_or_else(|| HarnessError::Config("missing required setting `scenario`".into()))?;
        let scheme = self
            .scheme
            .ok_or_else(|| HarnessError::Config("missing required setting `scheme`".into()))?;
        let explicit = [self.tableau_a.is_some(), self.tableau_b.is_some(), self.tableau_c.is_some()];
        let tableau = match (self.tableau, explicit) {
            (Some(_), [false, false, false]) | (None, [false, false, false]) => {
                TableauSpec::Builtin(self.tableau.unwrap_or(BuiltinTableau::Midpoint2))
            }
            (None, [true, true, true]) => TableauSpec::Explicit {
                a: self.tableau_a.unwrap_or_default(),
                b: self.tableau_b.unwrap_or_default(),
                c: self.tableau_c.unwrap_or_default(),
            },
            (Some(_), _) => {
                return Err(HarnessError::Config("give either `tableau` or explicit arrays, not both".into()))
            }
            (None, _) => {
                return Err(HarnessError::Config(
                    "explicit tableaus need all of tableau_a, tableau_b and tableau_c".into(),
                ))
            }
        };
        let weno = self.weno.unwrap_or(default_weno(tableau.order()));
        let cfg = RunConfig {
            scenario,
            initial: self.initial.unwrap_or(InitialData::NonMaxwellian),
            scheme,
            tableau,
            collision: self.collision.unwrap_or(CollisionKind::Bgk),
            weno,
            nx: self.nx.unwrap_or(100),
            nv: self.nv.unwrap_or(32),
            cutoff: self.cutoff.unwrap_or(8.0),
            cfl: self.cfl.unwrap_or(0.5),
            mu_safety: self.mu_safety.unwrap_or(DEFAULT_MU_SAFETY),
            eps: self.eps,
            t_final: self.t_final,
            out: self.out.unwrap_or_else(|| PathBuf::from(format!("{}.csv", scenario.name()))),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
