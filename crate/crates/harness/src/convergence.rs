//! Self-convergence study on nested grids.
//!
//! Each run stores its density at every step. A fine run is compared to the
//! next coarser one at the coarse run's output times: the fine history is
//! interpolated linearly in time, averaged onto the coarse cells, and the
//! relative L1 error is maximized over those times.

use std::fmt;

use crate::{HarnessError, HarnessResult};

/// Density snapshots of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoHistory {
    pub times: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
}

impl RhoHistory {
    pub fn new(times: Vec<f64>, rho: Vec<Vec<f64>>) -> HarnessResult<Self> {
        if times.is_empty() || times.len() != rho.len() {
            return Err(HarnessError::Config(format!(
                "history needs one snapshot per time, got {} times and {} snapshots",
                times.len(),
                rho.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Config("history times must increase".into()));
        }
        let n = rho[0].len();
        if n == 0 || rho.iter().any(|r| r.len() != n) {
            return Err(HarnessError::Config("snapshots must share one nonzero cell count".into()));
        }
        Ok(Self { times, rho })
    }

    pub fn n_cells(&self) -> usize {
        self.rho[0].len()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("history is nonempty")
    }

    /// Linear interpolation in time; `t` must lie within the stored span.
    pub fn at(&self, t: f64) -> HarnessResult<Vec<f64>> {
        let (t0, t1) = (self.times[0], self.final_time());
        let slack = 1e-12 * t1.abs().max(1.0);
        if t < t0 - slack || t > t1 + slack {
            return Err(HarnessError::Config(format!(
                "time {t} outside the history span [{t0}, {t1}]"
            )));
        }
        let k = self.times.partition_point(|s| *s < t);
        if k == 0 {
            return Ok(self.rho[0].clone());
        }
        if k == self.times.len() {
            return Ok(self.rho[k - 1].clone());
        }
        let (ta, tb) = (self.times[k - 1], self.times[k]);
        let w = (t - ta) / (tb - ta);
        Ok(self.rho[k - 1]
            .iter()
            .zip(&self.rho[k])
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect())
    }
}

/// Averages groups of `fine.len() / n_coarse` neighbouring cells.
pub fn restrict(fine: &[f64], n_coarse: usize) -> HarnessResult<Vec<f64>> {
    if n_coarse == 0 || !fine.len().is_multiple_of(n_coarse) {
        return Err(HarnessError::Config(format!(
            "cannot restrict {} cells onto {n_coarse}",
            fine.len()
        )));
    }
    let r = fine.len() / n_coarse;
    Ok(fine.chunks_exact(r).map(|c| c.iter().sum::<f64>() / r as f64).collect())
}

/// `||a - b||_1 / ||b||_1` on one uniform grid.
pub fn relative_l1(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    let den: f64 = b.iter().map(|y| y.abs()).sum();
    num / den
}

/// `max_n ||R rho_fine(t_n) - rho_coarse(t_n)||_1 / ||rho_coarse(t_n)||_1`
/// over the coarse output times.
pub fn pair_error(fine: &RhoHistory, coarse: &RhoHistory) -> HarnessResult<f64> {
    let tol = 1e-10 * coarse.final_time().abs().max(1.0);
    if (fine.final_time() - coarse.final_time()).abs() > tol || (fine.times[0] - coarse.times[0]).abs() > tol {
        return Err(HarnessError::Config(format!(
            "misaligned histories: [{}, {}] vs [{}, {}]",
            fine.times[0],
            fine.final_time(),
            coarse.times[0],
            coarse.final_time()
        )));
    }
    let mut worst: f64 = 0.0;
    for (t, rc) in coarse.times.iter().zip(&coarse.rho) {
        let rf = restrict(&fine.at(*t)?, coarse.n_cells())?;
        worst = worst.max(relative_l1(&rf, rc));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Finite(f64),
    /// One of the two errors vanished.
    Degenerate,
}

impl Rate {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(r) => Some(r),
            Self::Degenerate => None,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(r) => write!(f, "{r:.3}"),
            Self::Degenerate => f.write_str("inf/degenerate"),
        }
    }
}

pub fn observed_rate(err_coarse: f64, err_fine: f64) -> Rate {
    if err_coarse > 0.0 && err_fine > 0.0 && err_coarse.is_finite() && err_fine.is_finite() {
        Rate::Finite((err_coarse / err_fine).log2())
    } else {
        Rate::Degenerate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    /// Cell count of the finer run in the pair.
    pub n_cells: usize,
    pub error: f64,
    /// Rate against the previous (coarser) row.
    pub rate: Option<Rate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn rates(&self) -> Vec<Rate> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    /// Smallest finite rate, `None` if every rate is degenerate.
    pub fn min_rate(&self) -> Option<f64> {
        self.rates().iter().filter_map(|r| r.value()).reduce(f64::min)
    }
}

impl fmt::Display for RateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>12} {:>14}", "Nx", "error", "rate")?;
        for r in &self.rows {
            let rate = r.rate.map_or_else(|| "-".to_string(), |x| x.to_string());
            writeln!(f, "{:>8} {:>12.4e} {:>14}", r.n_cells, r.error, rate)?;
        }
        Ok(())
    }
}

/// Errors and observed orders from histories on successively doubled grids,
/// given in any order.
pub fn convergence_rate(histories: &[RhoHistory]) -> HarnessResult<RateTable> {
    if histories.len() < 2 {
        return Err(HarnessError::Config("a convergence study needs at least two grids".into()));
    }
    let mut runs: Vec<&RhoHistory> = histories.iter().collect();
    runs.sort_by_key(|h| h.n_cells());
    for w in runs.windows(2) {
        if w[1].n_cells() != 2 * w[0].n_cells() {
            return Err(HarnessError::Config(format!(
                "grids must double: {} then {}",
                w[0].n_cells(),
                w[1].n_cells()
            )));
        }
    }
    let mut rows: Vec<RateRow> = Vec::new();
    for w in runs.windows(2) {
        let error = pair_error(w[1], w[0])?;
        let rate = rows.last().map(|prev| observed_rate(prev.error, error));
        rows.push(RateRow {
            n_cells: w[1].n_cells(),
            error,
            rate,
        });
    }
    Ok(RateTable { rows })
}
