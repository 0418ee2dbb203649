use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use exprk_core::integrators::{advance, AdvanceOptions, MuRule, StepContext, StepEvent, Trajectory};
use exprk_core::phase_space::{moments, MacroState};
use exprk_core::transport::{cfl_dt, TransportScheme};

use crate::config::RunConfig;
use crate::convergence::RhoHistory;
use crate::scenario::{build_scenario, Scenario};
use crate::{HarnessError, HarnessResult};

/// A scenario with its step context, ready to advance.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub ctx: StepContext,
    pub options: AdvanceOptions,
}

pub fn prepare(cfg: &RunConfig) -> HarnessResult<Prepared> {
    cfg.validate()?;
    let scenario = build_scenario(cfg.scenario, &cfg.scenario_params())?;
    let op = cfg.collision.build(&scenario.velocity)?;
    let ts = TransportScheme::new(cfg.weno);
    ts.check_grid(&scenario.spatial)?;
    let h = cfl_dt(&scenario.spatial, &scenario.velocity, cfg.cfl)?;
    let mu = op.mu_star(&scenario.initial, cfg.mu_safety)?;
    let ctx = StepContext::new(op, ts, cfg.tableau.tableau()?, scenario.eps_field()?, mu, h)?;
    let options = AdvanceOptions {
        scheme: cfg.scheme,
        t_final: scenario.t_final,
        h,
        mu: MuRule::Star { safety: cfg.mu_safety },
    };
    Ok(Prepared { scenario, ctx, options })
}

impl Prepared {
    pub fn execute(&mut self, observer: impl FnMut(&StepEvent<'_>)) -> HarnessResult<Trajectory> {
        Ok(advance(&mut self.ctx, &self.scenario.initial, &self.options, observer)?)
    }
}

pub fn rho_history(tr: &Trajectory) -> HarnessResult<RhoHistory> {
    RhoHistory::new(tr.times.clone(), tr.macro_history.iter().map(|m| m.rho.clone()).collect())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub final_state: MacroState,
    pub x: Vec<f64>,
}

/// Runs a configuration to its final time without writing anything.
pub fn run(cfg: &RunConfig) -> HarnessResult<RunOutput> {
    let mut p = prepare(cfg)?;
    let trajectory = p.execute(|_| {})?;
    let final_state = moments(&trajectory.f)?;
    if let Err(e) = final_state.check_admissible() {
        return Err(HarnessError::Numerical(e));
    }
    Ok(RunOutput {
        final_state,
        x: p.scenario.spatial.centers(),
        trajectory,
    })
}

/// `x,rho,u_x,u_y,T`, one row per cell.
pub fn write_csv(path: &Path, x: &[f64], m: &MacroState) -> HarnessResult<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| HarnessError::io(path, e))?);
    let mut body = String::from("x,rho,u_x,u_y,T\n");
    for (i, xi) in x.iter().enumerate() {
        let u = m.velocity(i);
        body.push_str(&format!("{xi:e},{:e},{:e},{:e},{:e}\n", m.rho[i], u[0], u[1], m.temperature(i)));
    }
    w.write_all(body.as_bytes()).map_err(|e| HarnessError::io(path, e))?;
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Config echo plus a few facts about the finished run.
pub fn write_sidecar(cfg: &RunConfig, out: &RunOutput) -> HarnessResult<PathBuf> {
    let path = sidecar_path(&cfg.out);
    let tr = &out.trajectory;
    let mut text = cfg.to_config_text();
    text.push_str(&format!(
        "# steps = {}\n# final_time = {:?}\n# clamped_cells = {}\n# min_f_over_max_f = {:e}\n",
        tr.steps,
        tr.times.last().copied().unwrap_or(0.0),
        tr.clamped_cells,
        tr.min_ratio
    ));
    std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

/// Runs, then writes the CSV and the sidecar.
pub fn run_and_write(cfg: &RunConfig) -> HarnessResult<RunOutput> {
    let out = run(cfg)?;
    write_csv(&cfg.out, &out.x, &out.final_state)?;
    write_sidecar(cfg, &out)?;
    Ok(out)
}
