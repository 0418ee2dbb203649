//! Time loop: fixed step with a shortened last step, `mu` refreshed from
//! the state at the start of every step.

use crate::phase_space::{moments_unchecked, MacroState, PhaseField};
use crate::{Error, Result};

use super::{step, Scheme, StepContext, StepOutcome};

/// How `mu` is chosen at each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuRule {
    /// `safety * mu_*(f^n)`.
    Star { safety: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct AdvanceOptions {
    pub scheme: Scheme,
    pub t_final: f64,
    pub h: f64,
    pub mu: MuRule,
}

/// Data handed to the observer after every step.
pub struct StepEvent<'a> {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub h: f64,
    pub mu: f64,
    pub f_prev: &'a PhaseField,
    pub outcome: &'a StepOutcome,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub f: PhaseField,
    /// `t = 0` followed by the end time of every step.
    pub times: Vec<f64>,
    /// `moments(f)` at every entry of `times`.
    pub macro_history: Vec<MacroState>,
    pub steps: usize,
    pub clamped_cells: usize,
    /// Smallest `min f / max f` seen over all step results.
    pub min_ratio: f64,
}

/// Number of steps of size at most `h` to reach `t_final`.
pub fn step_count(t_final: f64, h: f64) -> usize {
    if t_final <= 0.0 {
        return 0;
    }
    let n = (t_final / h).ceil();
    // guard against t_final being an exact multiple up to round-off
    if (n - 1.0) * h >= t_final * (1.0 - 1e-12) {
        (n - 1.0) as usize
    } else {
        n as usize
    }
}

pub fn advance(
    ctx: &mut StepContext,
    f0: &PhaseField,
    opts: &AdvanceOptions,
    mut observer: impl FnMut(&StepEvent<'_>),
) -> Result<Trajectory> {
    if !(opts.t_final >= 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time must be >= 0, got {}", opts.t_final)));
    }
    if !(opts.h > 0.0 && opts.h.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {}", opts.h)));
    }
    f0.check_finite()?;
    let n_steps = step_count(opts.t_final, opts.h);
    let mut f = f0.clone();
    let mut times = vec![0.0];
    let mut history = vec![moments_unchecked(&f)];
    let mut clamped = 0;
    let mut min_ratio = ratio(&f);
    let mut t = 0.0;
    for k in 0..n_steps {
        let h = if k + 1 == n_steps { opts.t_final - t } else { opts.h };
        let mu = match opts.mu {
            MuRule::Star { safety } => ctx.op.loss_bound(&f) * safety,
            MuRule::Fixed(mu) => mu,
        };
        ctx.set_step(mu, h)?;
        let outcome = step(opts.scheme, ctx, &f).map_err(|e| match e {
            Error::NonFinite { .. } => Error::Diverged { step: k },
            other => other,
        })?;
        if outcome.f_next.check_finite().is_err() {
            return Err(Error::Diverged { step: k });
        }
        t = if k + 1 == n_steps { opts.t_final } else { t + h };
        clamped += outcome.clamped_cells;
        min_ratio = min_ratio.min(ratio(&outcome.f_next));
        observer(&StepEvent {
            step: k,
            t,
            h,
            mu,
            f_prev: &f,
            outcome: &outcome,
        });
        f = outcome.f_next;
        times.push(t);
        history.push(moments_unchecked(&f));
    }
    Ok(Trajectory {
        f,
        times,
        macro_history: history,
        steps: n_steps,
        clamped_cells: clamped,
        min_ratio,
    })
}

fn ratio(f: &PhaseField) -> f64 {
    let max = f.max();
    if max > 0.0 {
        f.min() / max
    } else {
        0.0
    }
}
