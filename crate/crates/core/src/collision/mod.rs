//! Collision operators `Q(f)`, the shifted operator `P = Q + mu f` and the
//! shift bound `mu_*`.
//!
//! Three operators share one interface:
//!
//! - BGK relaxation `mu_bgk (M[f] - f)`;
//! - the Fourier-Galerkin (spectral) Boltzmann operator for 2D Maxwell
//!   molecules with constant kernel `B = S / (2 pi)`, evaluated with FFTs;
//! - the same bilinear Fourier sum with explicit DFTs and kernel weights
//!   computed by quadrature, kept as an independent reference.

mod fourier;
mod spectral;

use rayon::prelude::*;

pub use fourier::{d2_distance, d2_distance_cell, FourierGrid};
pub use spectral::{DirectSumMaxwell, SpectralMaxwell, DEFAULT_N_ANGLE, SUPPORT_RATIO};

use crate::phase_space::{cell_moments, maxwellian_cell, PhaseField};
use crate::{Error, Result};

/// Default multiplier applied to the `mu_*` bound.
pub const DEFAULT_MU_SAFETY: f64 = 1.05;

#[derive(Debug, Clone)]
pub enum CollisionOperator {
    Bgk { mu: f64 },
    SpectralMaxwell(SpectralMaxwell),
    DirectSumMaxwell(DirectSumMaxwell),
}

impl CollisionOperator {
    pub fn bgk(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("BGK frequency must be positive, got {mu}")));
        }
        Ok(Self::Bgk { mu })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bgk { .. } => "bgk",
            Self::SpectralMaxwell(_) => "spectral",
            Self::DirectSumMaxwell(_) => "direct",
        }
    }

    /// `Q(f)` at every spatial cell.
    pub fn apply_q(&self, f: &PhaseField) -> Result<PhaseField> {
        f.check_finite()?;
        self.apply_q_unchecked(f)
    }

    pub(crate) fn apply_q_unchecked(&self, f: &PhaseField) -> Result<PhaseField> {
        match self {
            Self::Bgk { mu } => bgk_q(*mu, f),
            Self::SpectralMaxwell(op) => op.apply_q(f),
            Self::DirectSumMaxwell(op) => op.apply_q(f),
        }
    }

    /// `P(f) = Q(f) + mu f`.
    pub fn apply_p(&self, f: &PhaseField, mu: f64) -> Result<PhaseField> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("shift mu must be positive, got {mu}")));
        }
        let mut p = self.apply_q(f)?;
        p.axpy(mu, f);
        Ok(p)
    }

    /// Gain term `Q+(f)` of the Maxwell-molecule operators.
    pub fn apply_gain(&self, f: &PhaseField) -> Result<PhaseField> {
        f.check_finite()?;
        match self {
            Self::Bgk { mu } => {
                let mut m = bgk_q(*mu, f)?;
                m.axpy(*mu, f);
                Ok(m)
            }
            Self::SpectralMaxwell(op) => op.apply_gain(f),
            Self::DirectSumMaxwell(op) => op.apply_gain(f),
        }
    }

    /// Bound on the loss frequency `sup |Q-|` times `safety`.
    ///
    /// BGK gives `mu_bgk`; Maxwell molecules give `S max_x rho(x)`.
    pub fn mu_star(&self, f: &PhaseField, safety: f64) -> Result<f64> {
        f.check_finite()?;
        f.check_nonnegative()?;
        if !(safety.is_finite() && safety >= 1.0) {
            return Err(Error::InvalidParameter(format!("mu safety factor must be >= 1, got {safety}")));
        }
        Ok(self.loss_bound(f) * safety)
    }

    /// `mu_*` without the sign check on `f`, for time loops that tolerate
    /// round-off negatives.
    pub(crate) fn loss_bound(&self, f: &PhaseField) -> f64 {
        match self {
            Self::Bgk { mu } => *mu,
            Self::SpectralMaxwell(op) => op.kernel_const() * max_density(f),
            Self::DirectSumMaxwell(op) => op.kernel_const() * max_density(f),
        }
    }
}

fn max_density(f: &PhaseField) -> f64 {
    let vg = f.velocity_grid();
    f.cells().map(|c| cell_moments(vg, c)[0]).fold(0.0, f64::max)
}

fn bgk_q(mu: f64, f: &PhaseField) -> Result<PhaseField> {
    let vg = *f.velocity_grid();
    let nv2 = vg.len();
    let mut out = PhaseField::zeros(*f.spatial_grid(), vg);
    out.values_mut()
        .par_chunks_mut(nv2)
        .zip(f.values().par_chunks(nv2))
        .enumerate()
        .try_for_each(|(i, (q, cell))| {
            let [rho, mx, my, e] = cell_moments(&vg, cell);
            let u = [mx / rho, my / rho];
            let t = e / rho - 0.5 * (u[0] * u[0] + u[1] * u[1]);
            if !(rho > 0.0 && t > 0.0 && t.is_finite()) {
                return Err(Error::Degenerate {
                    cell: i,
                    rho,
                    temperature: t,
                });
            }
            maxwellian_cell(&vg, rho, u, t, q);
            for (qv, fv) in q.iter_mut().zip(cell) {
                *qv = mu * (*qv - fv);
            }
            Ok(())
        })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{
        maxwellian, moments, Boundary, MacroState, SpatialGrid, VelocityGrid,
    };

    fn grids(nx: usize, nv: usize) -> (SpatialGrid, VelocityGrid) {
        (
            SpatialGrid::new(nx, 0.0, 1.0, Boundary::Periodic).unwrap(),
            VelocityGrid::new(nv, 8.0).unwrap(),
        )
    }

    fn bimodal(nx: usize, nv: usize) -> PhaseField {
        let (sg, vg) = grids(nx, nv);
        PhaseField::from_fn(sg, vg, |x, vx, vy| {
            let t0 = 0.6 + 0.2 * x;
            let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / (2.0 * t0)).exp();
            (1.0 + x) * (g(0.75, -0.75) + 0.5 * g(-0.75, 0.75))
        })
    }

    #[test]
    fn bgk_annihilates_maxwellians_and_conserves() {
        let (sg, vg) = grids(3, 32);
        let m = MacroState::uniform(3, 1.2, [0.3, -0.1], 0.9);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let op = CollisionOperator::bgk(2.0).unwrap();
        let q = op.apply_q(&f).unwrap();
        assert!(q.values().iter().all(|v| v.abs() < 1e-10 * f.max()));

        let f = bimodal(3, 32);
        let q = op.apply_q(&f).unwrap();
        let mq = crate::phase_space::moments_unchecked(&q);
        for i in 0..3 {
            for c in mq.conserved(i) {
                // tail truncation of the discrete Maxwellian at |v| = L
                assert!(c.abs() < 1e-8 * f.max(), "{c}");
            }
        }
    }

    #[test]
    fn bgk_p_equals_mu_maxwellian() {
        let (sg, vg) = grids(2, 32);
        let m = MacroState::uniform(2, 1.0, [0.0, 0.0], 1.0);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let op = CollisionOperator::bgk(1.5).unwrap();
        let p = op.apply_p(&f, 1.5).unwrap();
        for (a, b) in p.values().iter().zip(f.values()) {
            assert!((a - 1.5 * b).abs() < 1e-10 * f.max());
        }
        let zero = PhaseField::zeros(sg, vg);
        assert!(op.apply_p(&zero, 1.0).is_err(), "BGK of vacuum is degenerate");
        let spec = CollisionOperator::SpectralMaxwell(SpectralMaxwell::new(1.0, &vg).unwrap());
        let p0 = spec.apply_p(&zero, 1.0).unwrap();
        assert!(p0.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn p_minus_mu_f_recovers_q() {
        let f = bimodal(2, 16);
        let op = CollisionOperator::bgk(1.0).unwrap();
        let q = op.apply_q(&f).unwrap();
        let mut p = op.apply_p(&f, 3.0).unwrap();
        p.axpy(-3.0, &f);
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn mu_star_values() {
        let (sg, vg) = grids(4, 16);
        let m = MacroState::uniform(4, 2.0, [0.0, 0.0], 1.0);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let bgk = CollisionOperator::bgk(3.0).unwrap();
        assert!((bgk.mu_star(&f, DEFAULT_MU_SAFETY).unwrap() - 3.15).abs() < 1e-14);
        let spec = CollisionOperator::SpectralMaxwell(SpectralMaxwell::new(1.0, &vg).unwrap());
        let rho = moments(&f).unwrap().rho[0];
        assert!((rho - 2.0).abs() < 1e-6);
        assert!((spec.mu_star(&f, DEFAULT_MU_SAFETY).unwrap() - 1.05 * rho).abs() < 1e-13);
        let mut neg = f.clone();
        neg.values_mut()[5] = -1e-3;
        assert!(matches!(
            spec.mu_star(&neg, 1.05),
            Err(Error::NegativeDistribution { .. })
        ));
    }

    #[test]
    fn positivity_of_p_above_mu_star() {
        let f = bimodal(3, 32);
        let op = CollisionOperator::bgk(1.0).unwrap();
        let mu = op.mu_star(&f, 1.0).unwrap();
        let p = op.apply_p(&f, mu).unwrap();
        assert!(p.min() >= -1e-12 * f.max());
        let back = moments(&p).unwrap();
        assert!(back.rho.iter().all(|r| *r > 0.0));
    }
}
