//! Grids, distribution fields, velocity moments and Maxwellians.
//!
//! Velocity space is two dimensional, discretized on a cell-centered uniform
//! grid over `[-L, L]^2` with midpoint quadrature. Physical space is one
//! dimensional. A [`PhaseField`] stores `f(x_i, v_k)` with the velocity index
//! running fastest, so every spatial cell owns a contiguous `Nv * Nv` slice.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Velocity dimension. Several formulas below hard-wire `d = 2`.
pub const VELOCITY_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityGrid {
    n_per_dim: usize,
    cutoff: f64,
}

impl VelocityGrid {
    pub fn new(n_per_dim: usize, cutoff: f64) -> Result<Self> {
        if n_per_dim == 0 {
            return Err(Error::InvalidParameter("velocity grid needs Nv > 0".into()));
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "velocity cutoff must be positive, got {cutoff}"
            )));
        }
        Ok(Self { n_per_dim, cutoff })
    }

    pub fn n_per_dim(&self) -> usize {
        self.n_per_dim
    }

    /// Number of nodes per spatial cell, `Nv^2`.
    pub fn len(&self) -> usize {
        self.n_per_dim * self.n_per_dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.cutoff / self.n_per_dim as f64
    }

    /// Midpoint quadrature weight of a single node.
    pub fn weight(&self) -> f64 {
        let dv = self.spacing();
        dv * dv
    }

    /// One-dimensional node coordinate `v_k = -L + (k + 1/2) dv`.
    pub fn coord(&self, k: usize) -> f64 {
        -self.cutoff + (k as f64 + 0.5) * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n_per_dim).map(|k| self.coord(k)).collect()
    }

    /// Largest node speed along one axis, `L - dv/2`.
    pub fn max_speed(&self) -> f64 {
        self.cutoff - 0.5 * self.spacing()
    }

    /// Splits a flat node index into `(kx, ky)`.
    pub fn split(&self, node: usize) -> (usize, usize) {
        (node / self.n_per_dim, node % self.n_per_dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    ZeroGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n_cells: usize,
    x_min: f64,
    x_max: f64,
    boundary: Boundary,
}

impl SpatialGrid {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64, boundary: Boundary) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("spatial grid needs Nx > 0".into()));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "spatial domain [{x_min}, {x_max}] is empty"
            )));
        }
        Ok(Self {
            n_cells,
            x_min,
            x_max,
            boundary,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.spacing()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Same domain and boundary with a different resolution.
    pub fn with_cells(&self, n_cells: usize) -> Result<Self> {
        Self::new(n_cells, self.x_min, self.x_max, self.boundary)
    }
}

/// Distribution function sampled on `Nx x Nv x Nv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    sg: SpatialGrid,
    vg: VelocityGrid,
    values: Vec<f64>,
}

impl PhaseField {
    pub fn zeros(sg: SpatialGrid, vg: VelocityGrid) -> Self {
        Self {
            values: vec![0.0; sg.n_cells() * vg.len()],
            sg,
            vg,
        }
    }

    pub fn from_values(sg: SpatialGrid, vg: VelocityGrid, values: Vec<f64>) -> Result<Self> {
        let expected = sg.n_cells() * vg.len();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { sg, vg, values })
    }

    /// Samples `g(x, vx, vy)` at every cell center and velocity node.
    pub fn from_fn(sg: SpatialGrid, vg: VelocityGrid, g: impl Fn(f64, f64, f64) -> f64) -> Self {
        let v = vg.coords();
        let mut field = Self::zeros(sg, vg);
        for i in 0..sg.n_cells() {
            let x = sg.center(i);
            for (node, out) in field.cell_mut(i).iter_mut().enumerate() {
                let (kx, ky) = vg.split(node);
                *out = g(x, v[kx], v[ky]);
            }
        }
        field
    }

    pub fn spatial_grid(&self) -> &SpatialGrid {
        &self.sg
    }

    pub fn velocity_grid(&self) -> &VelocityGrid {
        &self.vg
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n_cells(&self) -> usize {
        self.sg.n_cells()
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let n = self.vg.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.vg.len();
        &mut self.values[i * n..(i + 1) * n]
    }

    pub fn cells(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.vg.len())
    }

    pub fn same_shape(&self, other: &PhaseField) -> bool {
        self.sg.n_cells() == other.sg.n_cells() && self.vg.len() == other.vg.len()
    }

    pub fn ensure_same_shape(&self, other: &PhaseField) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{} x {} vs {} x {}",
                self.sg.n_cells(),
                self.vg.len(),
                other.sg.n_cells(),
                other.vg.len()
            )))
        }
    }

    /// First non-finite entry, reported as `(cell, node)`.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(idx) => Err(Error::NonFinite {
                cell: idx / self.vg.len(),
                node: idx % self.vg.len(),
            }),
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|v| *v < 0.0) {
            None => Ok(()),
            Some(idx) => Err(Error::NegativeDistribution {
                cell: idx / self.vg.len(),
                node: idx % self.vg.len(),
                value: self.values[idx],
            }),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &PhaseField) {
        debug_assert!(self.same_shape(other));
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }
}

/// Conservative macroscopic variables `(rho, rho u, E)` per spatial cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    pub rho: Vec<f64>,
    pub momentum: Vec<[f64; 2]>,
    pub energy: Vec<f64>,
}

impl MacroState {
    pub fn zeros(n_cells: usize) -> Self {
        Self {
            rho: vec![0.0; n_cells],
            momentum: vec![[0.0; 2]; n_cells],
            energy: vec![0.0; n_cells],
        }
    }

    /// Builds the conservative state from `(rho, u, T)` per cell.
    pub fn from_primitive(rho: &[f64], u: &[[f64; 2]], temperature: &[f64]) -> Self {
        let mut m = Self::zeros(rho.len());
        for i in 0..rho.len() {
            m.set_primitive(i, rho[i], u[i], temperature[i]);
        }
        m
    }

    pub fn uniform(n_cells: usize, rho: f64, u: [f64; 2], temperature: f64) -> Self {
        let mut m = Self::zeros(n_cells);
        for i in 0..n_cells {
            m.set_primitive(i, rho, u, temperature);
        }
        m
    }

    pub fn set_primitive(&mut self, i: usize, rho: f64, u: [f64; 2], temperature: f64) {
        self.rho[i] = rho;
        self.momentum[i] = [rho * u[0], rho * u[1]];
        self.energy[i] = rho * temperature + 0.5 * rho * (u[0] * u[0] + u[1] * u[1]);
    }

    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    pub fn velocity(&self, i: usize) -> [f64; 2] {
        let r = self.rho[i];
        [self.momentum[i][0] / r, self.momentum[i][1] / r]
    }

    /// `T = E / rho - |u|^2 / 2`; with two velocity dimensions `e = T`.
    pub fn temperature(&self, i: usize) -> f64 {
        let u = self.velocity(i);
        self.energy[i] / self.rho[i] - 0.5 * (u[0] * u[0] + u[1] * u[1])
    }

    pub fn internal_energy(&self, i: usize) -> f64 {
        0.5 * VELOCITY_DIM as f64 * self.temperature(i)
    }

    pub fn temperatures(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.temperature(i)).collect()
    }

    pub fn velocities(&self) -> Vec<[f64; 2]> {
        (0..self.n_cells()).map(|i| self.velocity(i)).collect()
    }

    /// Conserved vector `(rho, rho u_x, rho u_y, E)` of one cell.
    pub fn conserved(&self, i: usize) -> [f64; 4] {
        [self.rho[i], self.momentum[i][0], self.momentum[i][1], self.energy[i]]
    }

    pub fn set_conserved(&mut self, i: usize, w: [f64; 4]) {
        self.rho[i] = w[0];
        self.momentum[i] = [w[1], w[2]];
        self.energy[i] = w[3];
    }

    /// `rho > 0` and `T > 0` in every cell.
    pub fn check_admissible(&self) -> Result<()> {
        for i in 0..self.n_cells() {
            let rho = self.rho[i];
            let t = if rho > 0.0 { self.temperature(i) } else { f64::NAN };
            if !(rho > 0.0 && t > 0.0 && t.is_finite()) {
                return Err(Error::Degenerate {
                    cell: i,
                    rho,
                    temperature: t,
                });
            }
        }
        Ok(())
    }
}

/// Knudsen number per spatial cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonField(Vec<f64>);

impl EpsilonField {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if let Some(i) = eps.iter().position(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Knudsen number must be positive, got {} at cell {i}",
                eps[i]
            )));
        }
        Ok(Self(eps))
    }

    pub fn constant(n_cells: usize, eps: f64) -> Result<Self> {
        Self::new(vec![eps; n_cells])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `(rho, rho u_x, rho u_y, E)` of a single velocity slice, no validation.
pub fn cell_moments(vg: &VelocityGrid, cell: &[f64]) -> [f64; 4] {
    let n = vg.n_per_dim();
    let v = vg.coords();
    let mut acc = [0.0; 4];
    for kx in 0..n {
        let row = &cell[kx * n..(kx + 1) * n];
        let vx = v[kx];
        let (mut s0, mut sy, mut syy) = (0.0, 0.0, 0.0);
        for (ky, &f) in row.iter().enumerate() {
            s0 += f;
            sy += v[ky] * f;
            syy += v[ky] * v[ky] * f;
        }
        acc[0] += s0;
        acc[1] += vx * s0;
        acc[2] += sy;
        acc[3] += 0.5 * (vx * vx * s0 + syy);
    }
    let w = vg.weight();
    acc.map(|a| a * w)
}

pub fn moments(f: &PhaseField) -> Result<MacroState> {
    f.check_finite()?;
    Ok(moments_unchecked(f))
}

pub(crate) fn moments_unchecked(f: &PhaseField) -> MacroState {
    let vg = f.velocity_grid();
    let mut m = MacroState::zeros(f.n_cells());
    for (i, cell) in f.cells().enumerate() {
        m.set_conserved(i, cell_moments(vg, cell));
    }
    m
}

/// Stress tensor `S = int (v-u)(v-u) f dv` and heat flux
/// `q = 1/2 int (v-u)|v-u|^2 f dv`, per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherMoments {
    pub stress: Vec<[[f64; 2]; 2]>,
    pub heat_flux: Vec<[f64; 2]>,
}

pub fn stress_and_heat_flux(f: &PhaseField) -> Result<HigherMoments> {
    let m = moments(f)?;
    m.check_admissible()?;
    let vg = f.velocity_grid();
    let v = vg.coords();
    let w = vg.weight();
    let mut stress = Vec::with_capacity(f.n_cells());
    let mut heat_flux = Vec::with_capacity(f.n_cells());
    for (i, cell) in f.cells().enumerate() {
        let u = m.velocity(i);
        let mut s = [[0.0; 2]; 2];
        let mut q = [0.0; 2];
        for (node, &fv) in cell.iter().enumerate() {
            let (kx, ky) = vg.split(node);
            let c = [v[kx] - u[0], v[ky] - u[1]];
            let c2 = c[0] * c[0] + c[1] * c[1];
            for a in 0..2 {
                for b in 0..2 {
                    s[a][b] += c[a] * c[b] * fv;
                }
                q[a] += 0.5 * c[a] * c2 * fv;
            }
        }
        stress.push(s.map(|row| row.map(|x| x * w)));
        heat_flux.push(q.map(|x| x * w));
    }
    Ok(HigherMoments { stress, heat_flux })
}

/// Writes `rho / (2 pi T) exp(-|v - u|^2 / (2T))` into `out`.
///
/// Separable in `(vx, vy)`, so only `2 Nv` exponentials are evaluated.
pub fn maxwellian_cell(vg: &VelocityGrid, rho: f64, u: [f64; 2], temperature: f64, out: &mut [f64]) {
    let n = vg.n_per_dim();
    let v = vg.coords();
    let inv_2t = 0.5 / temperature;
    let gx: Vec<f64> = v.iter().map(|&vx| (-(vx - u[0]).powi(2) * inv_2t).exp()).collect();
    let gy: Vec<f64> = v.iter().map(|&vy| (-(vy - u[1]).powi(2) * inv_2t).exp()).collect();
    let scale = rho / (2.0 * PI * temperature);
    for kx in 0..n {
        let a = scale * gx[kx];
        for (o, g) in out[kx * n..(kx + 1) * n].iter_mut().zip(&gy) {
            *o = a * g;
        }
    }
}

pub fn maxwellian(m: &MacroState, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<PhaseField> {
    if m.n_cells() != sg.n_cells() {
        return Err(Error::ShapeMismatch(format!(
            "macro state has {} cells, grid has {}",
            m.n_cells(),
            sg.n_cells()
        )));
    }
    m.check_admissible()?;
    let mut field = PhaseField::zeros(*sg, *vg);
    for i in 0..m.n_cells() {
        maxwellian_cell(vg, m.rho[i], m.velocity(i), m.temperature(i), field.cell_mut(i));
    }
    Ok(field)
}

/// `dx dv^2 sum |f|`
pub fn l1_norm(f: &PhaseField) -> f64 {
    let w = f.spatial_grid().spacing() * f.velocity_grid().weight();
    w * f.values().iter().map(|v| v.abs()).sum::<f64>()
}

pub fn l1_distance(f: &PhaseField, g: &PhaseField) -> Result<f64> {
    f.ensure_same_shape(g)?;
    let w = f.spatial_grid().spacing() * f.velocity_grid().weight();
    Ok(w * f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grids(nx: usize, nv: usize, l: f64) -> (SpatialGrid, VelocityGrid) {
        (
            SpatialGrid::new(nx, 0.0, 1.0, Boundary::Periodic).unwrap(),
            VelocityGrid::new(nv, l).unwrap(),
        )
    }

    #[test]
    fn nodes_are_symmetric_and_cell_centered() {
        let vg = VelocityGrid::new(32, 8.0).unwrap();
        assert_eq!(vg.spacing() * 32.0, 16.0);
        for k in 0..32 {
            assert!((vg.coord(k) + vg.coord(31 - k)).abs() < 1e-15);
        }
        assert_eq!(vg.coord(0), -8.0 + 0.25);
        assert_eq!(vg.max_speed(), 7.75);
    }

    #[test]
    fn unit_maxwellian_moments() {
        let (sg, vg) = grids(3, 32, 8.0);
        let m = MacroState::uniform(3, 1.0, [0.0, 0.0], 1.0);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let back = moments(&f).unwrap();
        for i in 0..3 {
            assert!((back.rho[i] - 1.0).abs() < 1e-8);
            let u = back.velocity(i);
            assert!(u[0].abs() < 1e-8 && u[1].abs() < 1e-8);
            assert!((back.temperature(i) - 1.0).abs() < 1e-8);
        }
        let peak = {
            let mut cell = vec![0.0; 1];
            let one = VelocityGrid::new(1, 0.5).unwrap();
            maxwellian_cell(&one, 1.0, [0.0, 0.0], 1.0, &mut cell);
            cell[0]
        };
        assert!((peak - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((l1_norm(&f) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cold_maxwellian_round_trip_is_quadrature_limited() {
        // At T = 1/4 the node spacing equals the thermal width; the midpoint
        // rule error on T is about 5e-8 there.
        let (sg, vg) = grids(1, 32, 8.0);
        let m = MacroState::uniform(1, 1.0, [0.6, -0.8], 0.25);
        let back = moments(&maxwellian(&m, &sg, &vg).unwrap()).unwrap();
        assert!((back.rho[0] - 1.0).abs() < 2e-8);
        assert!((back.temperature(0) - 0.25).abs() < 1e-7);
    }

    #[test]
    fn zero_field_has_zero_moments() {
        let (sg, vg) = grids(4, 8, 8.0);
        let m = moments(&PhaseField::zeros(sg, vg)).unwrap();
        assert!(m.rho.iter().all(|r| *r == 0.0));
        assert!(m.energy.iter().all(|e| *e == 0.0));
        assert!(m.momentum.iter().all(|p| p == &[0.0, 0.0]));
    }

    #[test]
    fn two_gaussian_mass_matches_closed_form() {
        // int exp(-|v - u|^2 / T0) dv = pi T0, so rho = rho0 pi T0 and the
        // opposite drifts cancel.
        let rho0 = 1.3;
        let t0 = 0.35;
        let (sg, vg) = grids(1, 64, 8.0);
        let f = PhaseField::from_fn(sg, vg, |_, vx, vy| {
            let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / t0).exp();
            0.5 * rho0 * (g(0.75, -0.75) + g(-0.75, 0.75))
        });
        let m = moments(&f).unwrap();
        assert!((m.rho[0] - rho0 * PI * t0).abs() < 1e-10);
        let u = m.velocity(0);
        assert!(u[0].abs() < 1e-12 && u[1].abs() < 1e-12);
        // T = (|u1|^2 + T0) / 2 with d = 2
        assert!((m.temperature(0) - (1.125 + t0) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_input_reports_first_index() {
        let (sg, vg) = grids(2, 4, 8.0);
        let mut f = PhaseField::zeros(sg, vg);
        f.cell_mut(1)[3] = f64::NAN;
        assert_eq!(moments(&f), Err(Error::NonFinite { cell: 1, node: 3 }));
    }

    #[test]
    fn degenerate_temperature_is_an_error() {
        let (sg, vg) = grids(2, 8, 8.0);
        let mut m = MacroState::uniform(2, 1.0, [0.0, 0.0], 1.0);
        m.set_primitive(1, 1.0, [0.0, 0.0], 0.0);
        assert!(matches!(
            maxwellian(&m, &sg, &vg),
            Err(Error::Degenerate { cell: 1, .. })
        ));
        m.set_primitive(1, -1.0, [0.0, 0.0], 1.0);
        assert!(matches!(
            maxwellian(&m, &sg, &vg),
            Err(Error::Degenerate { cell: 1, .. })
        ));
    }

    #[test]
    fn stress_and_heat_flux_of_maxwellian() {
        let (sg, vg) = grids(1, 32, 8.0);
        let m = MacroState::uniform(1, 2.0, [0.3, -0.2], 0.8);
        let f = maxwellian(&m, &sg, &vg).unwrap();
        let h = stress_and_heat_flux(&f).unwrap();
        let s = h.stress[0];
        assert!((s[0][0] - 1.6).abs() < 1e-9);
        assert!((s[1][1] - 1.6).abs() < 1e-9);
        assert!(s[0][1].abs() < 1e-9);
        assert!(h.heat_flux[0][0].abs() < 1e-9 && h.heat_flux[0][1].abs() < 1e-9);
    }

    #[test]
    fn l1_distance_rejects_shape_mismatch() {
        let (sg, vg) = grids(2, 4, 8.0);
        let (sg3, _) = grids(3, 4, 8.0);
        let a = PhaseField::zeros(sg, vg);
        let b = PhaseField::zeros(sg3, vg);
        assert!(matches!(l1_distance(&a, &b), Err(Error::ShapeMismatch(_))));
        assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
    }

    fn field_from(values: Vec<f64>) -> PhaseField {
        let (sg, vg) = grids(2, 4, 8.0);
        PhaseField::from_values(sg, vg, values).unwrap()
    }

    proptest! {
        #[test]
        fn maxwellian_round_trip(
            rho in 0.1f64..5.0,
            speed in 0.0f64..1.0,
            angle in 0.0f64..std::f64::consts::TAU,
            t in 0.3f64..1.1,
        ) {
            let (ux, uy) = (speed * angle.cos(), speed * angle.sin());
            let (sg, vg) = grids(1, 32, 8.0);
            let m = MacroState::uniform(1, rho, [ux, uy], t);
            let f = maxwellian(&m, &sg, &vg).unwrap();
            prop_assert!(f.values().iter().all(|v| *v > 0.0));
            let back = moments(&f).unwrap();
            prop_assert!((back.rho[0] / rho - 1.0).abs() < 1e-8);
            let u = back.velocity(0);
            prop_assert!((u[0] - ux).abs() < 1e-8 && (u[1] - uy).abs() < 1e-8);
            prop_assert!((back.temperature(0) - t).abs() < 1e-8);
        }

        #[test]
        fn moments_are_linear(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            f in proptest::collection::vec(0.0f64..1.0, 32),
            g in proptest::collection::vec(0.0f64..1.0, 32),
        ) {
            let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let mf = moments(&field_from(f)).unwrap();
            let mg = moments(&field_from(g)).unwrap();
            let mc = moments(&field_from(combo)).unwrap();
            for i in 0..2 {
                let lhs = mc.conserved(i);
                let (x, y) = (mf.conserved(i), mg.conserved(i));
                for c in 0..4 {
                    let rhs = a * x[c] + b * y[c];
                    let scale = (a * x[c]).abs() + (b * y[c]).abs() + 1e-300;
                    prop_assert!((lhs[c] - rhs).abs() <= 1e-13 * scale.max(1.0));
                }
            }
        }

        #[test]
        fn l1_triangle_inequality(
            f in proptest::collection::vec(-1.0f64..1.0, 32),
            g in proptest::collection::vec(-1.0f64..1.0, 32),
            h in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            let (f, g, h) = (field_from(f), field_from(g), field_from(h));
            let fh = l1_distance(&f, &h).unwrap();
            let fg = l1_distance(&f, &g).unwrap();
            let gh = l1_distance(&g, &h).unwrap();
            prop_assert!(fh <= fg + gh + 1e-12);
        }
    }
}
