//! Upwind WENO discretization of the advection term `v_x d/dx f`.
//!
//! The advection speed is constant for each velocity node, so every node is
//! an independent 1D linear advection problem: the numerical flux is the
//! upwind-biased reconstruction of `f` times `v_x`, with no flux splitting.

use std::str::FromStr;

use rayon::prelude::*;

use crate::phase_space::{Boundary, PhaseField, SpatialGrid, VelocityGrid};
use crate::{Error, Result};

/// Regularization of the Jiang-Shu nonlinear weights.
pub const WENO_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransportOrder {
    Upwind1,
    Weno3,
    Weno5,
}

impl TransportOrder {
    /// Ghost cells needed on each side.
    pub fn ghosts(self) -> usize {
        match self {
            Self::Upwind1 => 1,
            Self::Weno3 => 2,
            Self::Weno5 => 3,
        }
    }

    /// Cells spanned by one reconstruction stencil.
    pub fn stencil_width(self) -> usize {
        2 * self.ghosts() - 1
    }

    /// Interface value on the downwind face of the center cell of `s`,
    /// where `s` lists the stencil from far upwind to far downwind.
    #[inline]
    pub fn reconstruct(self, s: &[f64]) -> f64 {
        match self {
            Self::Upwind1 => s[0],
            Self::Weno3 => weno3(s[0], s[1], s[2]),
            Self::Weno5 => weno5(s[0], s[1], s[2], s[3], s[4]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Upwind1 => "upwind1",
            Self::Weno3 => "weno3",
            Self::Weno5 => "weno5",
        }
    }
}

impl FromStr for TransportOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upwind1" | "upwind" | "1" => Ok(Self::Upwind1),
            "weno3" | "3" => Ok(Self::Weno3),
            "weno5" | "5" => Ok(Self::Weno5),
            other => Err(Error::InvalidParameter(format!("unknown transport order `{other}`"))),
        }
    }
}

#[inline]
fn weno3(a: f64, b: f64, c: f64) -> f64 {
    let q0 = 0.5 * (3.0 * b - a);
    let q1 = 0.5 * (b + c);
    let b0 = (b - a) * (b - a);
    let b1 = (c - b) * (c - b);
    let a0 = (1.0 / 3.0) / ((WENO_EPS + b0) * (WENO_EPS + b0));
    let a1 = (2.0 / 3.0) / ((WENO_EPS + b1) * (WENO_EPS + b1));
    (a0 * q0 + a1 * q1) / (a0 + a1)
}

#[inline]
fn weno5(a: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    let q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
    let q1 = (-b + 5.0 * c + 2.0 * d) / 6.0;
    let q2 = (2.0 * c + 5.0 * d - e) / 6.0;
    let b0 = 13.0 / 12.0 * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let b1 = 13.0 / 12.0 * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let b2 = 13.0 / 12.0 * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);
    let a0 = 0.1 / ((WENO_EPS + b0) * (WENO_EPS + b0));
    let a1 = 0.6 / ((WENO_EPS + b1) * (WENO_EPS + b1));
    let a2 = 0.3 / ((WENO_EPS + b2) * (WENO_EPS + b2));
    (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
}

/// Copies `line` into `ext` with `g` ghost cells on each side.
pub fn fill_ghosts(line: &[f64], g: usize, boundary: Boundary, ext: &mut Vec<f64>) {
    let n = line.len();
    ext.clear();
    ext.resize(n + 2 * g, 0.0);
    ext[g..g + n].copy_from_slice(line);
    for k in 0..g {
        let (left, right) = match boundary {
            Boundary::Periodic => (line[(n - 1 - k % n) % n], line[k % n]),
            Boundary::ZeroGradient => (line[0], line[n - 1]),
        };
        ext[g - 1 - k] = left;
        ext[g + n + k] = right;
    }
}

/// Upwind interface values `f_{p - 1/2}` for `p = 0..=n` from a ghosted line.
pub fn interface_values(order: TransportOrder, ext: &[f64], n: usize, wind_positive: bool, out: &mut Vec<f64>) {
    let g = order.ghosts();
    let w = order.stencil_width();
    out.clear();
    let mut buf = [0.0; 5];
    for p in 0..=n {
        let v = if wind_positive {
            order.reconstruct(&ext[p..p + w])
        } else {
            for (k, b) in buf[..w].iter_mut().enumerate() {
                *b = ext[p + 2 * g - 1 - k];
            }
            order.reconstruct(&buf[..w])
        };
        out.push(v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportScheme {
    pub order: TransportOrder,
}

impl TransportScheme {
    pub fn new(order: TransportOrder) -> Self {
        Self { order }
    }

    pub fn check_grid(&self, sg: &SpatialGrid) -> Result<()> {
        let required = self.order.stencil_width().max(2);
        if sg.n_cells() < required {
            return Err(Error::StencilTooWide {
                n_cells: sg.n_cells(),
                required,
            });
        }
        Ok(())
    }

    /// Discrete `v_x df/dx` at every cell and velocity node.
    pub fn divergence(&self, f: &PhaseField) -> Result<PhaseField> {
        f.check_finite()?;
        self.divergence_unchecked(f)
    }

    pub(crate) fn divergence_unchecked(&self, f: &PhaseField) -> Result<PhaseField> {
        let sg = *f.spatial_grid();
        let vg = *f.velocity_grid();
        self.check_grid(&sg)?;
        let n = sg.n_cells();
        let nv2 = vg.len();
        let dx = sg.spacing();
        let g = self.order.ghosts();
        let values = f.values();

        // One independent sweep per velocity node, node-major result.
        let columns: Vec<Vec<f64>> = (0..nv2)
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), Vec::new()),
                |(line, ext, faces), node| {
                    let vx = vg.coord(vg.split(node).0);
                    line.clear();
                    line.extend((0..n).map(|i| values[i * nv2 + node]));
                    fill_ghosts(line, g, sg.boundary(), ext);
                    interface_values(self.order, ext, n, vx > 0.0, faces);
                    (0..n).map(|i| vx * (faces[i + 1] - faces[i]) / dx).collect()
                },
            )
            .collect();

        let mut out = PhaseField::zeros(sg, vg);
        let dst = out.values_mut();
        for (node, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                dst[i * nv2 + node] = *v;
            }
        }
        Ok(out)
    }
}

/// CFL-limited step `cfl * dx / max |v_x|`.
pub fn cfl_dt(sg: &SpatialGrid, vg: &VelocityGrid, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::InvalidParameter(format!("CFL number must lie in (0, 1], got {cfl}")));
    }
    Ok(cfl * sg.spacing() / vg.max_speed())
}
