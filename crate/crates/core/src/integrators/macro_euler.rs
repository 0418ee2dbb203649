//! Explicit RK for the Euler limit of the kinetic equation (two velocity
//! dimensions, so `p = rho T` and the sound speed is `sqrt(2 T)`).

use rayon::prelude::*;

use crate::phase_space::{maxwellian, MacroState, PhaseField, SpatialGrid, VelocityGrid};
use crate::tableau::Tableau;
use crate::transport::{fill_ghosts, TransportOrder};
use crate::{Error, Result};

/// Physical flux `(rho u_x, rho u_x^2 + p, rho u_x u_y, (E + p) u_x)`.
fn euler_flux(w: [f64; 4]) -> [f64; 4] {
    let [rho, mx, my, e] = w;
    let ux = mx / rho;
    let uy = my / rho;
    let p = e - 0.5 * rho * (ux * ux + uy * uy);
    [mx, mx * ux + p, my * ux, (e + p) * ux]
}

fn wave_speed(w: [f64; 4]) -> f64 {
    let [rho, mx, my, e] = w;
    let ux = mx / rho;
    let t = e / rho - 0.5 * (ux * ux + (my / rho).powi(2));
    ux.abs() + (2.0 * t.max(0.0)).sqrt()
}

/// Admissibility check shared by every macro stage.
fn check_state(m: &MacroState) -> Result<()> {
    for i in 0..m.n_cells() {
        let rho = m.rho[i];
        let t = m.temperature(i);
        if !(rho > 0.0 && t > 0.0 && rho.is_finite() && t.is_finite()) {
            return Err(Error::Vacuum {
                cell: i,
                rho,
                temperature: t,
            });
        }
    }
    Ok(())
}

/// Semi-discrete right-hand side `-dF/dx`, WENO on a local Lax-Friedrichs
/// split `F = (F + a U)/2 + (F - a U)/2`, `a` taken over each face's stencil.
pub fn euler_rhs(m: &MacroState, sg: &SpatialGrid, order: TransportOrder) -> Result<Vec<[f64; 4]>> {
    let n = sg.n_cells();
    let required = order.stencil_width().max(2);
    if n < required {
        return Err(Error::StencilTooWide { n_cells: n, required });
    }
    let g = order.ghosts();
    let w = order.stencil_width();
    let mut ext = Vec::new();
    let mut comps: Vec<Vec<f64>> = Vec::with_capacity(4);
    for c in 0..4 {
        let line: Vec<f64> = (0..n).map(|i| m.conserved(i)[c]).collect();
        fill_ghosts(&line, g, sg.boundary(), &mut ext);
        comps.push(ext.clone());
    }
    let ne = n + 2 * g;
    let states: Vec<[f64; 4]> = (0..ne)
        .map(|k| [comps[0][k], comps[1][k], comps[2][k], comps[3][k]])
        .collect();
    let fluxes: Vec<[f64; 4]> = states.iter().map(|s| euler_flux(*s)).collect();
    let speeds: Vec<f64> = states.iter().map(|s| wave_speed(*s)).collect();

    let faces: Vec<[f64; 4]> = (0..=n)
        .into_par_iter()
        .map(|p| {
            let a = speeds[p..p + 2 * g].iter().copied().fold(0.0, f64::max);
            let mut plus = [0.0; 5];
            let mut minus = [0.0; 5];
            let mut out = [0.0; 4];
            for c in 0..4 {
                for k in 0..w {
                    let l = p + k;
                    plus[k] = 0.5 * (fluxes[l][c] + a * states[l][c]);
                    let r = p + 2 * g - 1 - k;
                    minus[k] = 0.5 * (fluxes[r][c] - a * states[r][c]);
                }
                out[c] = order.reconstruct(&plus[..w]) + order.reconstruct(&minus[..w]);
            }
            out
        })
        .collect();
    let dx = sg.spacing();
    Ok((0..n)
        .map(|i| {
            let mut r = [0.0; 4];
            for c in 0..4 {
                r[c] = -(faces[i + 1][c] - faces[i][c]) / dx;
            }
            r
        })
        .collect())
}

/// Result of one macro RK step: the new state and every stage state.
#[derive(Debug, Clone)]
pub struct MacroStep {
    pub next: MacroState,
    pub stages: Vec<MacroState>,
}

/// One explicit RK step of the Euler system with the coefficients of `tab`.
pub fn macro_euler_rk(
    tab: &Tableau,
    m_n: &MacroState,
    sg: &SpatialGrid,
    h: f64,
    order: TransportOrder,
) -> Result<MacroStep> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    check_state(m_n)?;
    let nu = tab.stages();
    let n = m_n.n_cells();
    let mut stages: Vec<MacroState> = Vec::with_capacity(nu);
    let mut rhs: Vec<Vec<[f64; 4]>> = Vec::with_capacity(nu);
    for row in 0..=nu {
        let (coeffs, _) = tab.row(row);
        let mut m = m_n.clone();
        for (j, a) in coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for i in 0..n {
                let mut w = m.conserved(i);
                for c in 0..4 {
                    w[c] += h * a * rhs[j][i][c];
                }
                m.set_conserved(i, w);
            }
        }
        check_state(&m)?;
        if row == nu {
            return Ok(MacroStep { next: m, stages });
        }
        rhs.push(euler_rhs(&m, sg, order)?);
        stages.push(m);
    }
    unreachable!("loop returns at the final row")
}

/// Fixed equilibrium for one ExpRK-F step: the Maxwellian of the Euler
/// state advanced by `h` from `m_n`.
#[derive(Debug, Clone)]
pub struct MTilde {
    pub macro_step: MacroStep,
    pub field: PhaseField,
}

pub fn build_m_tilde(
    tab: &Tableau,
    m_n: &MacroState,
    sg: &SpatialGrid,
    vg: &VelocityGrid,
    h: f64,
    order: TransportOrder,
) -> Result<MTilde> {
    let macro_step = macro_euler_rk(tab, m_n, sg, h, order)?;
    let field = maxwellian(&macro_step.next, sg, vg)?;
    Ok(MTilde { macro_step, field })
}
