//! Fourier-Galerkin Boltzmann operator for 2D Maxwell molecules.
//!
//! With the constant kernel `B = S / (2 pi)` and the collision integral
//! truncated to relative speeds `|q| <= R`, the coefficients of `Q(f)` are
//!
//! ```text
//! Qhat_k = sum_{l + m = k} fhat_l fhat_m [B+(l, m) - B-(m)]
//! B+(l, m) = 2 pi S int_0^R r J0(r |xi_l + xi_m| / 2) J0(r |xi_l - xi_m| / 2) dr
//! B-(m)    = 2 pi S R J1(R |xi_m|) / |xi_m|
//! ```
//!
//! with both `l` and `m` inside the mode box. The truncation radius is
//! `R = 2 SUPPORT_RATIO L`, the largest radius for which the periodized
//! collision integral does not alias.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::fourier::{dft_explicit, idft_explicit, mode_frequency, FourierGrid, C64};
use crate::linalg::gauss_legendre;
use crate::phase_space::{PhaseField, VelocityGrid};
use crate::{Error, Result};

/// Ratio between the support radius of `f` and the cutoff `L`.
pub const SUPPORT_RATIO: f64 = 2.0 / (3.0 + std::f64::consts::SQRT_2);

/// Angular quadrature points used by [`DirectSumMaxwell::new`] callers that
/// have no better estimate.
pub const DEFAULT_N_ANGLE: usize = 16;

fn truncation_radius(vg: &VelocityGrid) -> f64 {
    2.0 * SUPPORT_RATIO * vg.cutoff()
}

fn check_kernel_const(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("collision kernel constant must be positive, got {s}")))
    }
}

/// Integer lattice vector squared length `|l +- m|^2` in units of `(pi / 2L)^2`.
fn lattice_sq(n: usize, l: usize, m: usize, sign: i64) -> i64 {
    let half = (n / 2) as i64;
    let c = |j: usize| j as i64 - half;
    let (l1, l2) = (c(l / n), c(l % n));
    let (m1, m2) = (c(m / n), c(m % n));
    let s1 = l1 + sign * m1;
    let s2 = l2 + sign * m2;
    s1 * s1 + s2 * s2
}

/// `int_0^R r J0(a r) J0(b r) dr` in closed form.
fn bessel_product_integral(a: f64, b: f64, r: f64, equal: bool) -> f64 {
    if equal {
        let j0 = libm::j0(a * r);
        let j1 = libm::j1(a * r);
        0.5 * r * r * (j0 * j0 + j1 * j1)
    } else {
        r * (a * libm::j1(a * r) * libm::j0(b * r) - b * libm::j0(a * r) * libm::j1(b * r))
            / (a * a - b * b)
    }
}

/// Accumulates `sum_{l+m=k} fhat_l fhat_m (gain(l,m) - loss(m))` in centered
/// index space, dropping products that leave the mode box.
fn convolve(n: usize, fh: &[C64], gain: &[f64], loss: Option<&[f64]>, out: &mut [C64]) {
    let n2 = n * n;
    let h = n / 2;
    out.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
    for l1 in 0..n {
        let m1_lo = h.saturating_sub(l1);
        let m1_hi = (n + h).saturating_sub(l1).min(n);
        for l2 in 0..n {
            let l = l1 * n + l2;
            let fl = fh[l];
            if fl.re == 0.0 && fl.im == 0.0 {
                continue;
            }
            let m2_lo = h.saturating_sub(l2);
            let m2_hi = (n + h).saturating_sub(l2).min(n);
            let row = &gain[l * n2..(l + 1) * n2];
            for m1 in m1_lo..m1_hi {
                let k1 = l1 + m1 - h;
                for m2 in m2_lo..m2_hi {
                    let k2 = l2 + m2 - h;
                    let m = m1 * n + m2;
                    let w = match loss {
                        Some(loss) => row[m] - loss[m],
                        None => row[m],
                    };
                    out[k1 * n + k2] += fl * fh[m] * w;
                }
            }
        }
    }
}

/// Spectral operator evaluated with FFTs and closed-form Bessel weights.
/// Requires a power-of-two `Nv`.
#[derive(Debug, Clone)]
pub struct SpectralMaxwell {
    s: f64,
    fourier: FourierGrid,
    gain: Arc<Vec<f64>>,
    loss: Arc<Vec<f64>>,
}

impl SpectralMaxwell {
    pub fn new(s: f64, vg: &VelocityGrid) -> Result<Self> {
        check_kernel_const(s)?;
        let fourier = FourierGrid::new(vg)?;
        let n = vg.n_per_dim();
        let n2 = n * n;
        let r = truncation_radius(vg);
        let unit = PI / (2.0 * vg.cutoff());
        let mut cache: HashMap<(i64, i64), f64> = HashMap::new();
        let mut gain = vec![0.0; n2 * n2];
        for l in 0..n2 {
            for m in 0..n2 {
                let sp = lattice_sq(n, l, m, 1);
                let sm = lattice_sq(n, l, m, -1);
                gain[l * n2 + m] = *cache.entry((sp, sm)).or_insert_with(|| {
                    let a = unit * (sp as f64).sqrt();
                    let b = unit * (sm as f64).sqrt();
                    2.0 * PI * s * bessel_product_integral(a, b, r, sp == sm)
                });
            }
        }
        let loss = (0..n2)
            .map(|m| {
                let xi = (mode_frequency(vg, m / n).powi(2) + mode_frequency(vg, m % n).powi(2)).sqrt();
                if xi == 0.0 {
                    PI * s * r * r
                } else {
                    2.0 * PI * s * r * libm::j1(r * xi) / xi
                }
            })
            .collect();
        Ok(Self {
            s,
            fourier,
            gain: Arc::new(gain),
            loss: Arc::new(loss),
        })
    }

    pub fn kernel_const(&self) -> f64 {
        self.s
    }

    pub fn truncation_radius(&self) -> f64 {
        truncation_radius(self.fourier.velocity_grid())
    }

    pub fn apply_q(&self, f: &PhaseField) -> Result<PhaseField> {
        self.evaluate(f, true)
    }

    pub fn apply_gain(&self, f: &PhaseField) -> Result<PhaseField> {
        self.evaluate(f, false)
    }

    fn evaluate(&self, f: &PhaseField, with_loss: bool) -> Result<PhaseField> {
        let vg = *f.velocity_grid();
        if vg != *self.fourier.velocity_grid() {
            return Err(Error::ShapeMismatch(
                "collision operator was built for a different velocity grid".into(),
            ));
        }
        let n = vg.n_per_dim();
        let loss = with_loss.then(|| self.loss.as_slice());
        let mut out = PhaseField::zeros(*f.spatial_grid(), vg);
        out.values_mut()
            .par_chunks_mut(vg.len())
            .zip(f.values().par_chunks(vg.len()))
            .for_each(|(q, cell)| {
                let fh = self.fourier.forward(cell);
                let mut qh = vec![C64::new(0.0, 0.0); fh.len()];
                convolve(n, &fh, &self.gain, loss, &mut qh);
                self.fourier.inverse(&qh, q);
            });
        Ok(out)
    }
}

/// Reference evaluation of the same Fourier sum: explicit DFTs, a literal
/// `l + m = k` double loop and kernel weights from radial Gauss-Legendre
/// times angular midpoint quadrature (no Bessel functions).
#[derive(Debug, Clone)]
pub struct DirectSumMaxwell {
    s: f64,
    vg: VelocityGrid,
    n_angle: usize,
    n_radial: usize,
    gain: Arc<Vec<f64>>,
    loss: Arc<Vec<f64>>,
}

impl DirectSumMaxwell {
    pub fn new(s: f64, vg: &VelocityGrid, n_angle: usize) -> Result<Self> {
        let r = truncation_radius(vg);
        let n_radial = 32 + (r * max_half_frequency(vg)).ceil() as usize;
        Self::with_quadrature(s, vg, n_angle, n_radial)
    }

    /// Quadrature sized so the midpoint rule resolves the largest Bessel
    /// argument on this grid to round-off.
    pub fn resolved(s: f64, vg: &VelocityGrid) -> Result<Self> {
        let z = truncation_radius(vg) * max_half_frequency(vg);
        let n_angle = 2 * ((z + 8.0).ceil() as usize);
        Self::new(s, vg, n_angle)
    }

    pub fn with_quadrature(s: f64, vg: &VelocityGrid, n_angle: usize, n_radial: usize) -> Result<Self> {
        check_kernel_const(s)?;
        let n = vg.n_per_dim();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("direct-sum operator needs an even Nv, got {n}")));
        }
        if n_angle < 4 || !n_angle.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("angular points must be even and >= 4, got {n_angle}")));
        }
        if n_radial == 0 {
            return Err(Error::InvalidParameter("radial points must be positive".into()));
        }
        let r = truncation_radius(vg);
        let unit = PI / (2.0 * vg.cutoff());
        let (nodes, weights) = gauss_legendre(n_radial, 0.0, r);
        let dtheta = 2.0 * PI / n_angle as f64;
        let dirs: Vec<(f64, f64)> = (0..n_angle)
            .map(|j| {
                let t = (j as f64 + 0.5) * dtheta;
                (t.cos(), t.sin())
            })
            .collect();
        // angular[r][s] = int_0^{2 pi} cos(rho unit s . e_theta) dtheta, s in [-n, n]^2
        let side = 2 * n + 1;
        let angular: Vec<Vec<f64>> = nodes
            .iter()
            .map(|rho| {
                let mut row = vec![0.0; side * side];
                for s1 in 0..side {
                    for s2 in 0..side {
                        let a1 = unit * (s1 as f64 - n as f64);
                        let a2 = unit * (s2 as f64 - n as f64);
                        row[s1 * side + s2] = dtheta
                            * dirs.iter().map(|(c, s)| (rho * (a1 * c + a2 * s)).cos()).sum::<f64>();
                    }
                }
                row
            })
            .collect();
        let half = (n / 2) as i64;
        let lat = |idx: usize| [(idx / n) as i64 - half, (idx % n) as i64 - half];
        let slot = |v: [i64; 2]| ((v[0] + n as i64) as usize) * side + (v[1] + n as i64) as usize;
        let n2 = n * n;
        let mut gain = vec![0.0; n2 * n2];
        for l in 0..n2 {
            let lv = lat(l);
            for m in 0..n2 {
                let mv = lat(m);
                let sp = slot([lv[0] + mv[0], lv[1] + mv[1]]);
                let sm = slot([lv[0] - mv[0], lv[1] - mv[1]]);
                let mut acc = 0.0;
                for (k, (rho, w)) in nodes.iter().zip(&weights).enumerate() {
                    acc += w * rho * angular[k][sp] * angular[k][sm];
                }
                gain[l * n2 + m] = s / (2.0 * PI) * acc;
            }
        }
        let loss = (0..n2)
            .map(|m| {
                let mv = lat(m);
                let sl = slot([2 * mv[0], 2 * mv[1]]);
                s * nodes
                    .iter()
                    .zip(&weights)
                    .enumerate()
                    .map(|(k, (rho, w))| w * rho * angular[k][sl])
                    .sum::<f64>()
            })
            .collect();
        Ok(Self {
            s,
            vg: *vg,
            n_angle,
            n_radial,
            gain: Arc::new(gain),
            loss: Arc::new(loss),
        })
    }

    pub fn kernel_const(&self) -> f64 {
        self.s
    }

    pub fn n_angle(&self) -> usize {
        self.n_angle
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn apply_q(&self, f: &PhaseField) -> Result<PhaseField> {
        self.evaluate(f, true)
    }

    pub fn apply_gain(&self, f: &PhaseField) -> Result<PhaseField> {
        self.evaluate(f, false)
    }

    fn evaluate(&self, f: &PhaseField, with_loss: bool) -> Result<PhaseField> {
        let vg = *f.velocity_grid();
        if vg != self.vg {
            return Err(Error::ShapeMismatch(
                "collision operator was built for a different velocity grid".into(),
            ));
        }
        let n = vg.n_per_dim();
        let n2 = n * n;
        let half = (n / 2) as i64;
        let mut out = PhaseField::zeros(*f.spatial_grid(), vg);
        out.values_mut()
            .par_chunks_mut(n2)
            .zip(f.values().par_chunks(n2))
            .for_each(|(q, cell)| {
                let fh = dft_explicit(&vg, cell);
                let mut qh = vec![C64::new(0.0, 0.0); n2];
                for (k, qk) in qh.iter_mut().enumerate() {
                    let k1 = (k / n) as i64 - half;
                    let k2 = (k % n) as i64 - half;
                    for l in 0..n2 {
                        let m1 = k1 - ((l / n) as i64 - half);
                        let m2 = k2 - ((l % n) as i64 - half);
                        if m1 < -half || m1 >= half || m2 < -half || m2 >= half {
                            continue;
                        }
                        let m = ((m1 + half) as usize) * n + (m2 + half) as usize;
                        let mut w = self.gain[l * n2 + m];
                        if with_loss {
                            w -= self.loss[m];
                        }
                        *qk += fh[l] * fh[m] * w;
                    }
                }
                idft_explicit(&vg, &qh, q);
            });
        Ok(out)
    }
}

/// Largest `|xi_l + xi_m| / 2` over the mode box.
fn max_half_frequency(vg: &VelocityGrid) -> f64 {
    let n = vg.n_per_dim() as f64;
    PI / (2.0 * vg.cutoff()) * n * std::f64::consts::SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{
        maxwellian, moments_unchecked, Boundary, MacroState, SpatialGrid,
    };

    fn grid(nx: usize, nv: usize) -> (SpatialGrid, VelocityGrid) {
        (
            SpatialGrid::new(nx, 0.0, 1.0, Boundary::Periodic).unwrap(),
            VelocityGrid::new(nv, 8.0).unwrap(),
        )
    }

    fn bimodal(sg: SpatialGrid, vg: VelocityGrid) -> PhaseField {
        PhaseField::from_fn(sg, vg, |x, vx, vy| {
            let t = 0.7 + 0.3 * x;
            let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / (2.0 * t)).exp();
            (g(1.0, 0.2) + (0.5 + x) * g(-1.0, -0.4)) / (2.0 * PI * t)
        })
    }

    #[test]
    fn bessel_closed_form_matches_quadrature() {
        let r = 5.0;
        let (x, w) = gauss_legendre(80, 0.0, r);
        for &(a, b) in &[(0.0, 0.0), (0.0, 1.3), (0.7, 0.7), (1.9, 0.4), (2.2, 2.2 + 1e-3)] {
            let q: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x * libm::j0(a * x) * libm::j0(b * x))
                .sum();
            let c = bessel_product_integral(a, b, r, a == b);
            assert!((q - c).abs() < 1e-11, "a={a} b={b}: {q} vs {c}");
        }
    }

    #[test]
    fn spectral_matches_direct_sum() {
        let (sg, vg) = grid(2, 8);
        let f = bimodal(sg, vg);
        let spec = SpectralMaxwell::new(1.0, &vg).unwrap();
        let direct = DirectSumMaxwell::resolved(1.0, &vg).unwrap();
        let a = spec.apply_q(&f).unwrap();
        let b = direct.apply_q(&f).unwrap();
        let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).sum();
        let den: f64 = b.values().iter().map(|y| y.abs()).sum();
        assert!(num / den <= 1e-10, "relative L1 gap {}", num / den);
    }

    #[test]
    fn coarse_angular_rule_is_visibly_worse() {
        let (sg, vg) = grid(1, 8);
        let f = bimodal(sg, vg);
        let spec = SpectralMaxwell::new(1.0, &vg).unwrap().apply_q(&f).unwrap();
        let coarse = DirectSumMaxwell::new(1.0, &vg, DEFAULT_N_ANGLE).unwrap().apply_q(&f).unwrap();
        let num: f64 = spec.values().iter().zip(coarse.values()).map(|(x, y)| (x - y).abs()).sum();
        let den: f64 = spec.values().iter().map(|y| y.abs()).sum();
        assert!(num / den > 1e-10);
    }

    #[test]
    fn spectral_conserves_mass() {
        let (sg, vg) = grid(3, 32);
        // narrow enough to sit inside the support ball of radius SUPPORT_RATIO * L
        let f = PhaseField::from_fn(sg, vg, |x, vx, vy| {
            let t = 0.6 + 0.1 * x;
            let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / (2.0 * t)).exp();
            g(0.75, -0.75) + (0.5 + x) * g(-0.75, 0.75)
        });
        let q = SpectralMaxwell::new(1.0, &vg).unwrap().apply_q(&f).unwrap();
        let mq = moments_unchecked(&q);
        let rho = moments_unchecked(&f).rho;
        for i in 0..3 {
            assert!(mq.rho[i].abs() < 1e-12 * rho[i], "mass {}", mq.rho[i]);
            // only mass is conserved to round-off by the Fourier-Galerkin sum
            let [_, px, py, e] = mq.conserved(i);
            assert!(px.abs().max(py.abs()) < 1e-6 * rho[i], "momentum {px} {py}");
            assert!(e.abs() < 1e-6 * rho[i], "energy {e}");
        }
    }

    #[test]
    fn spectral_nearly_annihilates_maxwellian() {
        let (sg, vg) = grid(1, 32);
        let m = MacroState::uniform(1, 1.0, [0.0, 0.0], 1.0);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let q = SpectralMaxwell::new(1.0, &vg).unwrap().apply_q(&f).unwrap();
        let qmax = q.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(qmax < 1e-6 * f.max(), "{qmax}");
    }

    #[test]
    fn rejects_bad_grids() {
        let vg = VelocityGrid::new(12, 8.0).unwrap();
        assert_eq!(SpectralMaxwell::new(1.0, &vg).unwrap_err(), Error::NonPowerOfTwo(12));
        assert!(DirectSumMaxwell::new(1.0, &vg, 16).is_ok());
        let odd = VelocityGrid::new(7, 8.0).unwrap();
        assert!(DirectSumMaxwell::new(1.0, &odd, 16).is_err());
        let vg = VelocityGrid::new(8, 8.0).unwrap();
        assert!(SpectralMaxwell::new(0.0, &vg).is_err());
        let other = VelocityGrid::new(8, 6.0).unwrap();
        let (sg, _) = grid(1, 8);
        let f = PhaseField::zeros(sg, other);
        assert!(SpectralMaxwell::new(1.0, &vg).unwrap().apply_q(&f).is_err());
    }
}
