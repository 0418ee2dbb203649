//! Discrete Fourier transforms on the velocity grid.
//!
//! Coefficients are stored in centered order: index `j` along an axis is the
//! mode `k = j - N/2` with frequency `xi_k = pi k / L`, so that
//! `f(v_p) = sum_k fhat_k exp(i xi_k . v_p)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::phase_space::{cell_moments, PhaseField, VelocityGrid};
use crate::{Error, Result};

pub(crate) type C64 = Complex<f64>;

/// FFT plans and phase factors for one velocity grid.
#[derive(Clone)]
pub struct FourierGrid {
    vg: VelocityGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `exp(i xi_k (L - dv/2))` per centered 1D index.
    phase: Vec<C64>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid").field("vg", &self.vg).finish()
    }
}

impl FourierGrid {
    pub fn new(vg: &VelocityGrid) -> Result<Self> {
        let n = vg.n_per_dim();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(n));
        }
        let mut planner = FftPlanner::new();
        let shift = vg.cutoff() - 0.5 * vg.spacing();
        let phase = (0..n)
            .map(|j| C64::from_polar(1.0, mode_frequency(vg, j) * shift))
            .collect();
        Ok(Self {
            vg: *vg,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            phase,
        })
    }

    pub fn velocity_grid(&self) -> &VelocityGrid {
        &self.vg
    }

    /// Centered coefficients of one cell, length `Nv^2`.
    pub fn forward(&self, cell: &[f64]) -> Vec<C64> {
        let n = self.vg.n_per_dim();
        let mut buf: Vec<C64> = cell.iter().map(|v| C64::new(*v, 0.0)).collect();
        fft2(&mut buf, n, self.forward.as_ref());
        let scale = 1.0 / (n * n) as f64;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for q1 in 0..n {
            let j1 = (q1 + n / 2) % n;
            for q2 in 0..n {
                let j2 = (q2 + n / 2) % n;
                out[j1 * n + j2] = buf[q1 * n + q2] * self.phase[j1] * self.phase[j2] * scale;
            }
        }
        out
    }

    /// Real part of `sum_k coeff_k exp(i xi_k . v_p)` written into `out`.
    pub fn inverse(&self, coeffs: &[C64], out: &mut [f64]) {
        let n = self.vg.n_per_dim();
        let mut buf = vec![C64::new(0.0, 0.0); n * n];
        for j1 in 0..n {
            let q1 = (j1 + n / 2) % n;
            for j2 in 0..n {
                let q2 = (j2 + n / 2) % n;
                buf[q1 * n + q2] = coeffs[j1 * n + j2] * (self.phase[j1] * self.phase[j2]).conj();
            }
        }
        fft2(&mut buf, n, self.inverse.as_ref());
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re;
        }
    }
}

/// Frequency `pi k / L` of centered index `j`.
pub(crate) fn mode_frequency(vg: &VelocityGrid, j: usize) -> f64 {
    let k = j as f64 - (vg.n_per_dim() / 2) as f64;
    PI * k / vg.cutoff()
}

fn fft2(buf: &mut [C64], n: usize, plan: &dyn Fft<f64>) {
    plan.process(buf);
    let mut t = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = buf[i * n + j];
        }
    }
    plan.process(&mut t);
    for i in 0..n {
        for j in 0..n {
            buf[i * n + j] = t[j * n + i];
        }
    }
}

/// Explicit `O(Nv^4)` forward transform with the same normalization as
/// [`FourierGrid::forward`]. Works for any even `Nv`.
pub(crate) fn dft_explicit(vg: &VelocityGrid, cell: &[f64]) -> Vec<C64> {
    let n = vg.n_per_dim();
    let table = dft_table(vg, -1.0);
    let scale = 1.0 / (n * n) as f64;
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for j1 in 0..n {
        for j2 in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for p1 in 0..n {
                let e1 = table[j1 * n + p1];
                for p2 in 0..n {
                    s += e1 * table[j2 * n + p2] * cell[p1 * n + p2];
                }
            }
            out[j1 * n + j2] = s * scale;
        }
    }
    out
}

pub(crate) fn idft_explicit(vg: &VelocityGrid, coeffs: &[C64], out: &mut [f64]) {
    let n = vg.n_per_dim();
    let table = dft_table(vg, 1.0);
    for p1 in 0..n {
        for p2 in 0..n {
            let mut s = 0.0;
            for j1 in 0..n {
                let e1 = table[j1 * n + p1];
                for j2 in 0..n {
                    s += (coeffs[j1 * n + j2] * e1 * table[j2 * n + p2]).re;
                }
            }
            out[p1 * n + p2] = s;
        }
    }
}

/// `exp(sign i xi_j v_p)` indexed `[j * n + p]`.
fn dft_table(vg: &VelocityGrid, sign: f64) -> Vec<C64> {
    let n = vg.n_per_dim();
    let mut t = Vec::with_capacity(n * n);
    for j in 0..n {
        let xi = mode_frequency(vg, j);
        for p in 0..n {
            t.push(C64::from_polar(1.0, sign * xi * vg.coord(p)));
        }
    }
    t
}

/// Fourier-based distance `sup_{xi != 0} |F f(xi) - F g(xi)| / |xi|^2` between
/// two distributions on one velocity grid, sampled on the discrete modes.
///
/// Both inputs must carry the same mass and momentum (to `1e-8`), otherwise
/// the quotient blows up near the origin and the distance is not defined.
pub fn d2_distance_cell(vg: &VelocityGrid, f: &[f64], g: &[f64]) -> Result<f64> {
    let n = vg.n_per_dim();
    if f.len() != vg.len() || g.len() != vg.len() {
        return Err(Error::ShapeMismatch(format!(
            "d2 distance expects {} nodes, got {} and {}",
            vg.len(),
            f.len(),
            g.len()
        )));
    }
    let mf = cell_moments(vg, f);
    let mg = cell_moments(vg, g);
    for (c, name) in ["mass", "momentum x", "momentum y"].iter().enumerate() {
        if (mf[c] - mg[c]).abs() > 1e-8 {
            return Err(Error::MomentMismatch(format!(
                "{name} differs: {} vs {}",
                mf[c], mg[c]
            )));
        }
    }
    let diff: Vec<f64> = f.iter().zip(g).map(|(a, b)| a - b).collect();
    let coeffs = match FourierGrid::new(vg) {
        Ok(fg) => fg.forward(&diff),
        Err(_) => dft_explicit(vg, &diff),
    };
    // continuous transform: dv^2 sum = (2L)^2 fhat
    let scale = (2.0 * vg.cutoff()).powi(2);
    let mut worst: f64 = 0.0;
    for j1 in 0..n {
        let x1 = mode_frequency(vg, j1);
        for j2 in 0..n {
            let x2 = mode_frequency(vg, j2);
            let r2 = x1 * x1 + x2 * x2;
            if r2 == 0.0 {
                continue;
            }
            worst = worst.max(scale * coeffs[j1 * n + j2].norm() / r2);
        }
    }
    Ok(worst)
}

/// Largest [`d2_distance_cell`] over all spatial cells.
pub fn d2_distance(f: &PhaseField, g: &PhaseField) -> Result<f64> {
    f.ensure_same_shape(g)?;
    let vg = f.velocity_grid();
    let mut worst: f64 = 0.0;
    for (a, b) in f.cells().zip(g.cells()) {
        worst = worst.max(d2_distance_cell(vg, a, b)?);
    }
    Ok(worst)
}
