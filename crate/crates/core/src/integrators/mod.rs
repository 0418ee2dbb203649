//! Exponential Runge-Kutta steppers for `f_t + v f_x = Q(f) / eps`.
//!
//! Both schemes rewrite the equation with `P = Q + mu f` as
//!
//! ```text
//! d/dt [(f - E) e^{mu t / eps}] = e^{mu t / eps} [(P - mu E) / eps - v f_x - dE/dt]
//! ```
//!
//! and apply an explicit RK tableau to the bracketed unknown. ExpRK-F takes
//! `E = M~`, one Maxwellian per step from an Euler solve; ExpRK-V takes the
//! local Maxwellian `E = M(t)`, whose moments come from the moment system.
//! With `lambda = mu h / eps` per cell, row `i` of either scheme reads
//!
//! ```text
//! f(i) = E(i) + e^{-c_i lambda} (f^n - E^n)
//!      + sum_j a_ij lambda e^{(c_j - c_i) lambda} [P(j)/mu - E(j) - (eps/mu)(v f_x(j) + dE(j)/dt)]
//! ```
//!
//! and the final row uses `b` with abscissa 1.

mod advance;
mod macro_euler;

pub use advance::{advance, step_count, AdvanceOptions, MuRule, StepEvent, Trajectory};
pub use macro_euler::{build_m_tilde, euler_rhs, macro_euler_rk, MTilde, MacroStep};

use std::str::FromStr;

use rayon::prelude::*;

use crate::collision::CollisionOperator;
use crate::phase_space::{cell_moments, maxwellian, maxwellian_cell, EpsilonField, MacroState, PhaseField};
use crate::tableau::Tableau;
use crate::transport::TransportScheme;
use crate::{Error, Result};

/// Exponents above this are refused instead of overflowing.
pub const MAX_EXPONENT: f64 = 700.0;

/// Largest negative temperature the moment system may produce before the
/// step fails; smaller violations are clamped and counted.
pub const TEMPERATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExpRkF,
    ExpRkV,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExpRkF => "exprk-f",
            Self::ExpRkV => "exprk-v",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.to_ascii_lowercase().as_str() {
            "exprkf" | "f" => Ok(Self::ExpRkF),
            "exprkv" | "v" => Ok(Self::ExpRkV),
            _ => Err(Error::InvalidParameter(format!("unknown scheme `{s}` (expected exprk-f or exprk-v)"))),
        }
    }
}

/// Everything one step needs. `mu` is global; `lambda` is per cell.
#[derive(Debug, Clone)]
pub struct StepContext {
    pub op: CollisionOperator,
    pub ts: TransportScheme,
    pub tab: Tableau,
    pub eps: EpsilonField,
    mu: f64,
    h: f64,
    lambda: Vec<f64>,
}

impl StepContext {
    pub fn new(
        op: CollisionOperator,
        ts: TransportScheme,
        tab: Tableau,
        eps: EpsilonField,
        mu: f64,
        h: f64,
    ) -> Result<Self> {
        let mut ctx = Self {
            op,
            ts,
            tab,
            eps,
            mu: 1.0,
            h: 1.0,
            lambda: Vec::new(),
        };
        ctx.set_step(mu, h)?;
        Ok(ctx)
    }

    /// Changes `mu` and `h` and refreshes `lambda = mu h / eps`.
    pub fn set_step(&mut self, mu: f64, h: f64) -> Result<()> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("shift mu must be positive, got {mu}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {h}")));
        }
        self.mu = mu;
        self.h = h;
        self.lambda = self.eps.values().iter().map(|e| mu * h / e).collect();
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    fn check_shape(&self, f: &PhaseField) -> Result<()> {
        if self.eps.len() != f.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "epsilon field has {} cells, distribution has {}",
                self.eps.len(),
                f.n_cells()
            )));
        }
        self.ts.check_grid(f.spatial_grid())
    }
}

/// Cached quantities of one stage.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub f_stage: PhaseField,
    /// Moment-system state (ExpRK-V) or `moments(f_stage)` (ExpRK-F).
    pub m_stage: MacroState,
    pub p_stage: PhaseField,
    pub div_stage: PhaseField,
    /// `dM/dt` at the stage; `None` for ExpRK-F.
    pub dtm_stage: Option<PhaseField>,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub f_next: PhaseField,
    /// Euler update (ExpRK-F) or moment-system update (ExpRK-V).
    pub m_next: MacroState,
    pub stages: Vec<StageRecord>,
    /// Cells whose moment-system temperature was clamped.
    pub clamped_cells: usize,
    /// Largest `rho |T|` removed by clamping.
    pub clamped_amount: f64,
}

/// Per-cell weights of one row: `e^{-c_i lambda}` and
/// `a_ij lambda e^{(c_j - c_i) lambda}` for each earlier stage.
struct RowWeights {
    decay: Vec<f64>,
    terms: Vec<(usize, Vec<f64>)>,
}

fn row_weights(ctx: &StepContext, row: usize) -> Result<RowWeights> {
    let (coeffs, ci) = ctx.tab.row(row);
    let c = ctx.tab.c();
    let decay = ctx.lambda.iter().map(|l| (-ci * l).exp()).collect();
    let mut terms = Vec::new();
    for (j, a) in coeffs.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        let mut w = Vec::with_capacity(ctx.lambda.len());
        for (cell, l) in ctx.lambda.iter().enumerate() {
            let z = l * (c[j] - ci);
            if z > MAX_EXPONENT {
                return Err(Error::ExponentOverflow {
                    stage: row,
                    cell,
                    exponent: z,
                });
            }
            w.push(a * l * z.exp());
        }
        terms.push((j, w));
    }
    Ok(RowWeights { decay, terms })
}

/// `out = base + decay (f_n - base_n) + sum_j w_j source_j`, cell by cell.
fn assemble(
    base: &PhaseField,
    f_n: &PhaseField,
    base_n: &PhaseField,
    weights: &RowWeights,
    sources: &[PhaseField],
    stage: usize,
) -> Result<PhaseField> {
    let nv2 = f_n.velocity_grid().len();
    let mut out = PhaseField::zeros(*f_n.spatial_grid(), *f_n.velocity_grid());
    out.values_mut()
        .par_chunks_mut(nv2)
        .enumerate()
        .try_for_each(|(i, cell)| {
            let r = i * nv2..(i + 1) * nv2;
            let b = &base.values()[r.clone()];
            let fnc = &f_n.values()[r.clone()];
            let bn = &base_n.values()[r.clone()];
            let d = weights.decay[i];
            for k in 0..nv2 {
                cell[k] = b[k] + d * (fnc[k] - bn[k]);
            }
            for (j, w) in &weights.terms {
                let wi = w[i];
                if wi == 0.0 {
                    continue;
                }
                let s = &sources[*j].values()[r.clone()];
                for k in 0..nv2 {
                    cell[k] += wi * s[k];
                }
            }
            if cell.iter().any(|v| !v.is_finite()) {
                return Err(Error::StageNotFinite { stage, cell: i });
            }
            Ok(())
        })?;
    Ok(out)
}

/// `P/mu - E - (eps/mu)(div + dE/dt)` for one stage.
fn stage_source(
    ctx: &StepContext,
    p: &PhaseField,
    equilibrium: &PhaseField,
    div: &PhaseField,
    dtm: Option<&PhaseField>,
) -> PhaseField {
    let nv2 = p.velocity_grid().len();
    let inv_mu = 1.0 / ctx.mu;
    let eps = ctx.eps.values();
    let mut out = PhaseField::zeros(*p.spatial_grid(), *p.velocity_grid());
    out.values_mut()
        .par_chunks_mut(nv2)
        .enumerate()
        .for_each(|(i, cell)| {
            let r = i * nv2..(i + 1) * nv2;
            let kappa = eps[i] * inv_mu;
            let pv = &p.values()[r.clone()];
            let ev = &equilibrium.values()[r.clone()];
            let dv = &div.values()[r.clone()];
            for k in 0..nv2 {
                cell[k] = pv[k] * inv_mu - ev[k] - kappa * dv[k];
            }
            if let Some(dtm) = dtm {
                let tv = &dtm.values()[r];
                for k in 0..nv2 {
                    cell[k] -= kappa * tv[k];
                }
            }
        });
    out
}

/// One ExpRK-F step with a fixed equilibrium `m_tilde`.
pub fn exprk_f_step(ctx: &StepContext, f_n: &PhaseField, m_tilde: &PhaseField) -> Result<StepOutcome> {
    ctx.check_shape(f_n)?;
    f_n.ensure_same_shape(m_tilde)?;
    f_n.check_finite()?;
    let nu = ctx.tab.stages();
    let mut stages: Vec<StageRecord> = Vec::with_capacity(nu);
    let mut sources: Vec<PhaseField> = Vec::with_capacity(nu);
    for row in 0..=nu {
        let weights = row_weights(ctx, row)?;
        let f = if row == 0 {
            f_n.clone()
        } else {
            assemble(m_tilde, f_n, m_tilde, &weights, &sources, row)?
        };
        if row == nu {
            let m_next = crate::phase_space::moments_unchecked(&f);
            return Ok(StepOutcome {
                f_next: f,
                m_next,
                stages,
                clamped_cells: 0,
                clamped_amount: 0.0,
            });
        }
        let mut p = ctx.op.apply_q_unchecked(&f)?;
        p.axpy(ctx.mu, &f);
        let div = ctx.ts.divergence_unchecked(&f)?;
        sources.push(stage_source(ctx, &p, m_tilde, &div, None));
        stages.push(StageRecord {
            m_stage: crate::phase_space::moments_unchecked(&f),
            f_stage: f,
            p_stage: p,
            div_stage: div,
            dtm_stage: None,
        });
    }
    unreachable!("loop returns at the final row")
}

/// ExpRK-F with `M~` built from an Euler step of `moments(f_n)`.
/// Returns the outcome with `m_next` set to the Euler update.
pub fn exprk_f_full_step(ctx: &StepContext, f_n: &PhaseField) -> Result<StepOutcome> {
    let m_n = crate::phase_space::moments(f_n)?;
    let mt = build_m_tilde(
        &ctx.tab,
        &m_n,
        f_n.spatial_grid(),
        f_n.velocity_grid(),
        ctx.h,
        ctx.ts.order,
    )?;
    let mut out = exprk_f_step(ctx, f_n, &mt.field)?;
    out.m_next = mt.macro_step.next;
    Ok(out)
}

/// `dM/dt` of the Maxwellian of `m` along the flow `f_t = -div`, computed
/// from the moments of `div` by the chain rule through `(rho, u, T)`.
pub fn dt_maxwellian_from_div(div: &PhaseField, m: &MacroState) -> Result<PhaseField> {
    let vg = *div.velocity_grid();
    let n = vg.n_per_dim();
    let v = vg.coords();
    if m.n_cells() != div.n_cells() {
        return Err(Error::ShapeMismatch(format!(
            "macro state has {} cells, field has {}",
            m.n_cells(),
            div.n_cells()
        )));
    }
    m.check_admissible()?;
    let mut out = PhaseField::zeros(*div.spatial_grid(), vg);
    out.values_mut()
        .par_chunks_mut(vg.len())
        .zip(div.values().par_chunks(vg.len()))
        .enumerate()
        .for_each(|(i, (cell, dcell))| {
            let [d_rho, d_mx, d_my, d_e] = cell_moments(&vg, dcell).map(|x| -x);
            let rho = m.rho[i];
            let u = m.velocity(i);
            let t = m.temperature(i);
            let du = [(d_mx - u[0] * d_rho) / rho, (d_my - u[1] * d_rho) / rho];
            let dt = d_e / rho - m.energy[i] * d_rho / (rho * rho) - (u[0] * du[0] + u[1] * du[1]);
            maxwellian_cell(&vg, rho, u, t, cell);
            for kx in 0..n {
                let cx = v[kx] - u[0];
                for ky in 0..n {
                    let cy = v[ky] - u[1];
                    let factor = d_rho / rho
                        + (cx * du[0] + cy * du[1]) / t
                        + ((cx * cx + cy * cy) / (2.0 * t * t) - 1.0 / t) * dt;
                    cell[kx * n + ky] *= factor;
                }
            }
        });
    Ok(out)
}

/// `dM/dt` with the transport term evaluated from `f`.
pub fn dt_maxwellian(ts: &TransportScheme, f: &PhaseField, m: &MacroState) -> Result<PhaseField> {
    let div = ts.divergence(f)?;
    dt_maxwellian_from_div(&div, m)
}

/// Applies the temperature clamp of the moment system. Returns the number
/// of clamped cells and the largest clamped `rho |T|`.
fn admit_moment_state(m: &mut MacroState, stage: usize) -> Result<(usize, f64)> {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for i in 0..m.n_cells() {
        let rho = m.rho[i];
        let t = m.temperature(i);
        if !(rho > 0.0 && rho.is_finite() && t.is_finite()) {
            return Err(Error::Vacuum {
                cell: i,
                rho,
                temperature: t,
            });
        }
        if t <= 0.0 {
            if t < -TEMPERATURE_TOLERANCE {
                return Err(Error::NegativeTemperature {
                    stage,
                    cell: i,
                    temperature: t,
                });
            }
            let u = m.velocity(i);
            m.set_primitive(i, rho, u, TEMPERATURE_TOLERANCE);
            count += 1;
            worst = worst.max(rho * t.abs());
        }
    }
    Ok((count, worst))
}

/// One ExpRK-V step.
pub fn exprk_v_step(ctx: &StepContext, f_n: &PhaseField) -> Result<StepOutcome> {
    ctx.check_shape(f_n)?;
    f_n.check_finite()?;
    let sg = *f_n.spatial_grid();
    let vg = *f_n.velocity_grid();
    let nx = sg.n_cells();
    let m_n = crate::phase_space::moments_unchecked(f_n);
    let eq_n = maxwellian(&m_n, &sg, &vg)?;
    let nu = ctx.tab.stages();
    let h = ctx.h;
    let mut stages: Vec<StageRecord> = Vec::with_capacity(nu);
    let mut sources: Vec<PhaseField> = Vec::with_capacity(nu);
    let mut div_moments: Vec<Vec<[f64; 4]>> = Vec::with_capacity(nu);
    let mut clamped_cells = 0;
    let mut clamped_amount: f64 = 0.0;
    for row in 0..=nu {
        let (coeffs, _) = ctx.tab.row(row);
        let mut m = m_n.clone();
        for (j, a) in coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for i in 0..nx {
                let mut w = m.conserved(i);
                for c in 0..4 {
                    w[c] -= h * a * div_moments[j][i][c];
                }
                m.set_conserved(i, w);
            }
        }
        let (count, amount) = admit_moment_state(&mut m, row)?;
        clamped_cells += count;
        clamped_amount = clamped_amount.max(amount);
        let weights = row_weights(ctx, row)?;
        let (f, eq) = if row == 0 {
            (f_n.clone(), eq_n.clone())
        } else {
            let eq = maxwellian(&m, &sg, &vg)?;
            (assemble(&eq, f_n, &eq_n, &weights, &sources, row)?, eq)
        };
        if row == nu {
            return Ok(StepOutcome {
                f_next: f,
                m_next: m,
                stages,
                clamped_cells,
                clamped_amount,
            });
        }
        let mut p = ctx.op.apply_q_unchecked(&f)?;
        p.axpy(ctx.mu, &f);
        let div = ctx.ts.divergence_unchecked(&f)?;
        let dtm = dt_maxwellian_from_div(&div, &m)?;
        div_moments.push(div.cells().map(|c| cell_moments(&vg, c)).collect());
        sources.push(stage_source(ctx, &p, &eq, &div, Some(&dtm)));
        stages.push(StageRecord {
            f_stage: f,
            m_stage: m,
            p_stage: p,
            div_stage: div,
            dtm_stage: Some(dtm),
        });
    }
    unreachable!("loop returns at the final row")
}

/// Dispatches one step of either scheme.
pub fn step(scheme: Scheme, ctx: &StepContext, f_n: &PhaseField) -> Result<StepOutcome> {
    match scheme {
        Scheme::ExpRkF => exprk_f_full_step(ctx, f_n),
        Scheme::ExpRkV => exprk_v_step(ctx, f_n),
    }
}
