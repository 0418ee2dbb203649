//! First-order kinetic flux-vector splitting for the Euler limit.
//!
//! The flux through a face is the upwind half-space moment of the
//! Maxwellians on either side: `F = F+(U_left) + F-(U_right)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::phase_space::{Boundary, MacroState, SpatialGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub grid: SpatialGrid,
    pub state: MacroState,
}

impl EulerState {
    pub fn new(grid: SpatialGrid, state: MacroState) -> Result<Self> {
        if state.n_cells() != grid.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} cells in state, {} in grid",
                state.n_cells(),
                grid.n_cells()
            )));
        }
        Ok(Self { grid, state })
    }

    fn check(&self) -> Result<()> {
        let m = &self.state;
        for i in 0..m.n_cells() {
            let t = m.temperature(i);
            if !(m.rho[i] > 0.0 && t > 0.0 && t.is_finite()) {
                return Err(Error::Vacuum {
                    cell: i,
                    rho: m.rho[i],
                    temperature: t,
                });
            }
        }
        Ok(())
    }

    /// Largest characteristic speed `|u_x| + sqrt(2 T)`.
    pub fn max_speed(&self) -> f64 {
        (0..self.state.n_cells())
            .map(|i| self.state.velocity(i)[0].abs() + (2.0 * self.state.temperature(i)).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn cfl_step(&self, cfl: f64) -> f64 {
        cfl * self.grid.spacing() / self.max_speed()
    }
}

/// Half-space flux of one cell's Maxwellian over `v_x > 0` (`positive`)
/// or `v_x < 0`.
pub fn half_flux(rho: f64, u: [f64; 2], t: f64, positive: bool) -> [f64; 4] {
    let sgn = if positive { 1.0 } else { -1.0 };
    let s = u[0] / (2.0 * t).sqrt();
    let a = 0.5 * libm::erfc(-sgn * s);
    let g = sgn * (t / (2.0 * PI)).sqrt() * (-s * s).exp();
    let ux = u[0];
    let m1 = ux * a + g;
    let m2 = (ux * ux + t) * a + ux * g;
    let m3 = (ux * ux * ux + 3.0 * ux * t) * a + (ux * ux + 2.0 * t) * g;
    [
        rho * m1,
        rho * m2,
        rho * u[1] * m1,
        0.5 * rho * (m3 + (u[1] * u[1] + t) * m1),
    ]
}

pub fn kinetic_flux_step(s: &EulerState, h: f64) -> Result<EulerState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {h}")));
    }
    s.check()?;
    let n = s.grid.n_cells();
    let m = &s.state;
    let ghost = |i: isize| -> usize {
        match s.grid.boundary() {
            Boundary::Periodic => i.rem_euclid(n as isize) as usize,
            Boundary::ZeroGradient => i.clamp(0, n as isize - 1) as usize,
        }
    };
    let split: Vec<([f64; 4], [f64; 4])> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (rho, u, t) = (m.rho[i], m.velocity(i), m.temperature(i));
            (half_flux(rho, u, t, true), half_flux(rho, u, t, false))
        })
        .collect();
    // face p sits between cells p-1 and p
    let faces: Vec<[f64; 4]> = (0..=n)
        .map(|p| {
            let l = ghost(p as isize - 1);
            let r = ghost(p as isize);
            let mut f = [0.0; 4];
            for c in 0..4 {
                f[c] = split[l].0[c] + split[r].1[c];
            }
            f
        })
        .collect();
    let r = h / s.grid.spacing();
    let mut next = m.clone();
    for i in 0..n {
        let mut w = m.conserved(i);
        for c in 0..4 {
            w[c] -= r * (faces[i + 1][c] - faces[i][c]);
        }
        next.set_conserved(i, w);
    }
    let out = EulerState {
        grid: s.grid,
        state: next,
    };
    out.check()?;
    Ok(out)
}

/// Repeats [`kinetic_flux_step`] with the CFL step until `t_final`.
pub fn evolve(s: &EulerState, t_final: f64, cfl: f64) -> Result<EulerState> {
    let mut cur = s.clone();
    let mut t = 0.0;
    while t < t_final {
        let h = cur.cfl_step(cfl).min(t_final - t);
        cur = kinetic_flux_step(&cur, h)?;
        t += h;
        if t_final - t < 1e-14 * t_final {
            break;
        }
    }
    Ok(cur)
}
