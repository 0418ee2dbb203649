//! Explicit Runge-Kutta tableaus and their Shu-Osher form.
//!
//! The Shu-Osher coefficients are fixed by the relation
//! `beta_ij = alpha_ij (c_i - c_j)`, with the final step treated as row
//! `nu + 1` and abscissa 1. The diagnostics here (positivity hypotheses,
//! convexity weights, the `R1`/`R2` contraction factors) do not restrict which
//! tableaus the integrators accept.

use std::fmt;
use std::str::FromStr;

use crate::linalg::Matrix;
use crate::{Error, Result};

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    name: String,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Tableau {
    /// Validates strict lower triangularity, `sum_j a_ij = c_i` and `sum b = 1`.
    pub fn new(name: impl Into<String>, a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let nu = b.len();
        if nu == 0 {
            return Err(Error::InvalidParameter("tableau needs at least one stage".into()));
        }
        if a.len() != nu || c.len() != nu || a.iter().any(|row| row.len() != nu) {
            return Err(Error::InvalidParameter(format!(
                "tableau arrays must be {nu} x {nu}, {nu}, {nu}"
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row[i..].iter().any(|v| *v != 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "row {} of `a` is not strictly lower triangular",
                    i + 1
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - c[i]).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row {} of `a` sums to {s}, expected c = {}",
                    i + 1,
                    c[i]
                )));
            }
        }
        let sb: f64 = b.iter().sum();
        if (sb - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {sb}, expected 1")));
        }
        if a.iter().flatten().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tableau entries must be finite".into()));
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
            c,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn a_rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Coefficients of row `row` in `0..=nu`; row `nu` is the final step.
    pub fn row(&self, row: usize) -> (&[f64], f64) {
        if row == self.stages() {
            (&self.b, 1.0)
        } else {
            (&self.a[row][..row], self.c[row])
        }
    }

    /// True if `c_j <= c_i` whenever `j < i`, the final abscissa 1 included.
    pub fn nondecreasing_abscissae(&self) -> bool {
        self.c.windows(2).all(|w| w[0] <= w[1]) && self.c.iter().all(|c| *c <= 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinTableau {
    Euler1,
    Midpoint2,
    Heun2,
    Heun3,
    SspRk3,
}

impl BuiltinTableau {
    pub const ALL: [BuiltinTableau; 5] = [
        Self::Euler1,
        Self::Midpoint2,
        Self::Heun2,
        Self::Heun3,
        Self::SspRk3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Euler1 => "euler1",
            Self::Midpoint2 => "midpoint2",
            Self::Heun2 => "heun2",
            Self::Heun3 => "heun3",
            Self::SspRk3 => "ssprk3",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Self::Euler1 => 1,
            Self::Midpoint2 | Self::Heun2 => 2,
            Self::Heun3 | Self::SspRk3 => 3,
        }
    }

    pub fn tableau(self) -> Tableau {
        let (a, b, c) = match self {
            Self::Euler1 => (vec![vec![0.0]], vec![1.0], vec![0.0]),
            Self::Midpoint2 => (
                vec![vec![0.0, 0.0], vec![0.5, 0.0]],
                vec![0.0, 1.0],
                vec![0.0, 0.5],
            ),
            Self::Heun2 => (
                vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                vec![0.5, 0.5],
                vec![0.0, 1.0],
            ),
            Self::Heun3 => (
                vec![
                    vec![0.0, 0.0, 0.0],
                    vec![1.0 / 3.0, 0.0, 0.0],
                    vec![0.0, 2.0 / 3.0, 0.0],
                ],
                vec![0.25, 0.0, 0.75],
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            ),
            Self::SspRk3 => (
                vec![
                    vec![0.0, 0.0, 0.0],
                    vec![1.0, 0.0, 0.0],
                    vec![0.25, 0.25, 0.0],
                ],
                vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
                vec![0.0, 1.0, 0.5],
            ),
        };
        Tableau::new(self.name(), a, b, c).expect("builtin tableaus are consistent")
    }
}

impl fmt::Display for BuiltinTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        Self::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::UnknownTableau(s.to_string()))
    }
}

pub fn builtin(name: &str) -> Result<Tableau> {
    Ok(name.parse::<BuiltinTableau>()?.tableau())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    Alpha,
    Beta,
}

/// A negative Shu-Osher coefficient, rows and columns 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeEntry {
    pub row: usize,
    pub col: usize,
    pub which: Coefficient,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShuOsherForm {
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    parent: Tableau,
    negative: Vec<NegativeEntry>,
}

impl ShuOsherForm {
    /// `alpha` row in `0..=nu` (0-based; row 0 is the trivial first stage).
    pub fn alpha(&self, row: usize) -> &[f64] {
        &self.alpha[row]
    }

    pub fn beta(&self, row: usize) -> &[f64] {
        &self.beta[row]
    }

    pub fn parent(&self) -> &Tableau {
        &self.parent
    }

    pub fn rows(&self) -> usize {
        self.alpha.len()
    }

    pub fn negative_entries(&self) -> &[NegativeEntry] {
        &self.negative
    }

    pub fn row_is_nonnegative(&self, row: usize) -> bool {
        self.alpha[row].iter().chain(&self.beta[row]).all(|v| *v >= 0.0)
    }

    /// Abscissa of a row, with the final step at 1.
    pub fn abscissa(&self, row: usize) -> f64 {
        self.parent.row(row).1
    }

    /// `min alpha_ij / beta_ij` over `beta_ij > 0`: the factor relating the
    /// step bound of the exponential scheme to the forward-Euler transport bound.
    pub fn step_ratio(&self) -> f64 {
        self.alpha
            .iter()
            .flatten()
            .zip(self.beta.iter().flatten())
            .filter(|(_, b)| **b > 0.0)
            .map(|(a, b)| a / b)
            .fold(f64::INFINITY, f64::min)
    }

    /// Rebuilds `a_ij = beta_ij + sum_{k>j} alpha_ik a_kj` (and `b` for the
    /// final row) from the representation.
    pub fn reconstruct(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let nu = self.parent.stages();
        let a_parent = self.parent.a_rows();
        let rebuild = |row: usize| -> Vec<f64> {
            (0..row)
                .map(|j| {
                    self.beta[row][j]
                        + (j + 1..row)
                            .map(|k| self.alpha[row][k] * a_parent[k][j])
                            .sum::<f64>()
                })
                .collect()
        };
        let mut a = vec![vec![0.0; nu]; nu];
        for (row, a_row) in a.iter_mut().enumerate() {
            for (j, v) in rebuild(row).into_iter().enumerate() {
                a_row[j] = v;
            }
        }
        (a, rebuild(nu))
    }
}

/// Solves for the Shu-Osher form under `beta_ij = alpha_ij (c_i - c_j)`.
///
/// Per row the consistency conditions
/// `a_ij = alpha_ij (c_i - c_j) + sum_{k=j+1}^{i-1} alpha_ik a_kj`
/// are triangular in `alpha`, solved from `j = i-1` down to `j = 1`; the
/// solution is unique whenever the abscissae involved are distinct.
pub fn shu_osher_under_relation(t: &Tableau) -> Result<ShuOsherForm> {
    let nu = t.stages();
    let mut alpha = Vec::with_capacity(nu + 1);
    let mut beta = Vec::with_capacity(nu + 1);
    let mut negative = Vec::new();
    for row in 0..=nu {
        let (target, c_row) = t.row(row);
        let mut al = vec![0.0; row];
        for j in (0..row).rev() {
            let coupling: f64 = (j + 1..row).map(|k| al[k] * t.a(k, j)).sum();
            let rhs = target[j] - coupling;
            let gap = c_row - t.c()[j];
            if gap.abs() < CONSISTENCY_TOL {
                if rhs.abs() > CONSISTENCY_TOL {
                    return Err(Error::SingularShuOsher {
                        row: row + 1,
                        col: j + 1,
                    });
                }
                al[j] = 0.0;
            } else {
                al[j] = rhs / gap;
            }
        }
        if row > 0 {
            let s: f64 = al.iter().sum();
            if (s - 1.0).abs() > 1e-10 {
                return Err(Error::SingularShuOsher {
                    row: row + 1,
                    col: 1,
                });
            }
        }
        let be: Vec<f64> = al
            .iter()
            .enumerate()
            .map(|(j, a)| a * (c_row - t.c()[j]))
            .collect();
        for (j, (&a, &b)) in al.iter().zip(&be).enumerate() {
            if a < 0.0 {
                negative.push(NegativeEntry {
                    row: row + 1,
                    col: j + 1,
                    which: Coefficient::Alpha,
                    value: a,
                });
            }
            if b < 0.0 {
                negative.push(NegativeEntry {
                    row: row + 1,
                    col: j + 1,
                    which: Coefficient::Beta,
                    value: b,
                });
            }
        }
        alpha.push(al);
        beta.push(be);
    }
    Ok(ShuOsherForm {
        alpha,
        beta,
        parent: t.clone(),
        negative,
    })
}

/// Hypotheses of the positivity theorem for the fixed-equilibrium scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub beta_nonnegative: bool,
    pub alpha_nonnegative: bool,
    /// `0 = c_1 < c_2 < ... < c_nu < 1`
    pub abscissa_ordering: bool,
    pub negative_entries: Vec<NegativeEntry>,
    /// Set when the tableau admits no Shu-Osher form under the relation.
    pub representation_error: Option<Error>,
}

impl Theorem1Report {
    pub fn all_pass(&self) -> bool {
        self.beta_nonnegative && self.alpha_nonnegative && self.abscissa_ordering
    }

    /// Report for a tableau, including those without a representation.
    pub fn for_tableau(t: &Tableau) -> Self {
        match shu_osher_under_relation(t) {
            Ok(so) => validate_theorem1(&so),
            Err(e) => Self {
                beta_nonnegative: false,
                alpha_nonnegative: false,
                abscissa_ordering: strict_ordering(t.c()),
                negative_entries: Vec::new(),
                representation_error: Some(e),
            },
        }
    }
}

fn strict_ordering(c: &[f64]) -> bool {
    c.first() == Some(&0.0) && c.windows(2).all(|w| w[0] < w[1]) && c.last().is_some_and(|c| *c < 1.0)
}

pub fn validate_theorem1(so: &ShuOsherForm) -> Theorem1Report {
    let neg = so.negative_entries();
    Theorem1Report {
        beta_nonnegative: !neg.iter().any(|e| e.which == Coefficient::Beta),
        alpha_nonnegative: !neg.iter().any(|e| e.which == Coefficient::Alpha),
        abscissa_ordering: strict_ordering(so.parent().c()),
        negative_entries: neg.to_vec(),
        representation_error: None,
    }
}

/// `w_j = exp((c_j - c_i) lambda) (alpha_ij + lambda beta_ij)` and their sum.
pub fn convexity_weights(so: &ShuOsherForm, row: usize, lambda: f64) -> (Vec<f64>, f64) {
    let c_row = so.abscissa(row);
    let c = so.parent().c();
    let w: Vec<f64> = so
        .alpha(row)
        .iter()
        .zip(so.beta(row))
        .enumerate()
        .map(|(j, (a, b))| {
            let decay = (c[j] - c_row) * lambda;
            let lin = a + lambda * b;
            if lin == 0.0 { 0.0 } else { decay.exp() * lin }
        })
        .collect();
    let sum = w.iter().sum();
    (w, sum)
}

/// Contraction factors of the distance to equilibrium over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApDecay {
    pub r1: f64,
    /// Largest entry of the transport coefficient vector with `epsilon`
    /// factored out.
    pub r2_scale: f64,
}

/// `A_ij = (lambda/mu) a_ij e^{(c_j - c_i) lambda}`, `E = diag(e^{-c_i lambda})`.
pub fn ap_matrices(t: &Tableau, lambda: f64, mu: f64) -> (Matrix, Matrix) {
    let nu = t.stages();
    let c = t.c();
    let mut a = Matrix::zeros(nu);
    let mut e = Matrix::zeros(nu);
    for i in 0..nu {
        e[(i, i)] = (-c[i] * lambda).exp();
        for j in 0..i {
            a[(i, j)] = lambda / mu * t.a(i, j) * ((c[j] - c[i]) * lambda).exp();
        }
    }
    (a, e)
}

/// Evaluates `R1` and the `R2` scale.
///
/// `E^{-1} (I - C A)^{-1} E` equals `(I - B)^{-1}` with
/// `B_ij = C lambda a_ij / mu`, which keeps large `lambda` free of overflow.
pub fn r1_r2_diagnostic(t: &Tableau, lambda: f64, c_lip: f64, mu: f64) -> ApDecay {
    let nu = t.stages();
    let c = t.c();
    let mut i_minus_b = Matrix::identity(nu);
    let mut i_plus_b = Matrix::identity(nu);
    for i in 0..nu {
        for j in 0..i {
            let bij = c_lip * lambda * t.a(i, j) / mu;
            i_minus_b[(i, j)] = -bij;
            i_plus_b[(i, j)] = bij;
        }
    }
    let inv = i_minus_b
        .inverse_lower()
        .expect("unit lower triangular matrices are invertible");
    let b = t.b();
    let ones = vec![1.0; nu];
    let quad: f64 = b.iter().zip(inv.mul_vec(&ones)).map(|(bi, x)| bi * x).sum();
    let r1 = (-lambda).exp() * (1.0 + c_lip * lambda / mu * quad);

    let row = inv.mul(&i_plus_b).vec_mul(b);
    let r2_scale = row
        .iter()
        .zip(c)
        .map(|(r, cj)| (lambda / mu * r * ((cj - 1.0) * lambda).exp()).abs())
        .fold(0.0, f64::max);
    ApDecay { r1, r2_scale }
}

/// `R1` built literally from `A` and `E`; overflows once `lambda` passes a
/// few hundred. Used to cross-check [`r1_r2_diagnostic`].
pub fn r1_literal(t: &Tableau, lambda: f64, c_lip: f64, mu: f64) -> f64 {
    let nu = t.stages();
    let (a, e) = ap_matrices(t, lambda, mu);
    let mut i_minus_ca = Matrix::identity(nu);
    for i in 0..nu {
        for j in 0..i {
            i_minus_ca[(i, j)] = -c_lip * a[(i, j)];
        }
    }
    let inv = i_minus_ca.inverse_lower().expect("unit lower triangular");
    let e_diag: Vec<f64> = (0..nu).map(|i| e[(i, i)]).collect();
    let x = inv.mul_vec(&e_diag);
    let quad: f64 = (0..nu).map(|i| t.b()[i] * x[i] / e_diag[i]).sum();
    (-lambda).exp() * (1.0 + c_lip * lambda / mu * quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_conditions(t: &Tableau) -> [f64; 4] {
        let (b, c) = (t.b(), t.c());
        let nu = t.stages();
        let s1: f64 = b.iter().sum();
        let s2: f64 = (0..nu).map(|i| b[i] * c[i]).sum();
        let s3: f64 = (0..nu).map(|i| b[i] * c[i] * c[i]).sum();
        let s4: f64 = (0..nu)
            .map(|i| (0..nu).map(|j| b[i] * t.a(i, j) * c[j]).sum::<f64>())
            .sum();
        [s1, s2, s3, s4]
    }

    #[test]
    fn heun3_satisfies_third_order_conditions() {
        let o = order_conditions(&BuiltinTableau::Heun3.tableau());
        let expect = [1.0, 0.5, 1.0 / 3.0, 1.0 / 6.0];
        for (got, want) in o.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        let o = order_conditions(&BuiltinTableau::SspRk3.tableau());
        for (got, want) in o.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn row_sums_match_abscissae() {
        for bt in BuiltinTableau::ALL {
            let t = bt.tableau();
            for (i, row) in t.a_rows().iter().enumerate() {
                assert!((row.iter().sum::<f64>() - t.c()[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unknown_name_and_inconsistent_tableau() {
        assert!(matches!(builtin("rk4"), Err(Error::UnknownTableau(_))));
        assert_eq!(builtin("Heun-3").unwrap().name(), "heun3");
        let bad = Tableau::new("bad", vec![vec![0.0, 0.0], vec![0.4, 0.0]], vec![0.0, 1.0], vec![0.0, 0.5]);
        assert!(bad.is_err());
        let implicit = Tableau::new("imp", vec![vec![1.0]], vec![1.0], vec![1.0]);
        assert!(implicit.is_err());
    }

    #[test]
    fn euler_representation_is_trivial() {
        let so = shu_osher_under_relation(&BuiltinTableau::Euler1.tableau()).unwrap();
        assert_eq!(so.alpha(1), &[1.0]);
        assert_eq!(so.beta(1), &[1.0]);
        assert!(so.negative_entries().is_empty());
        assert!(validate_theorem1(&so).all_pass());
    }

    #[test]
    fn midpoint_final_row_is_negative() {
        // b_2 = 1 = alpha_32 (1 - 1/2)  =>  alpha_32 = 2
        // b_1 = 0 = alpha_31 + alpha_32 a_21  =>  alpha_31 = -1
        let so = shu_osher_under_relation(&BuiltinTableau::Midpoint2.tableau()).unwrap();
        assert_eq!(so.alpha(2), &[-1.0, 2.0]);
        assert_eq!(so.beta(2), &[-1.0, 1.0]);
        assert_eq!(so.alpha(1), &[1.0]);
        let rep = validate_theorem1(&so);
        assert!(!rep.alpha_nonnegative && !rep.beta_nonnegative && rep.abscissa_ordering);
        assert!(rep
            .negative_entries
            .iter()
            .all(|e| e.row == 3 && e.col == 1));
    }

    #[test]
    fn heun3_stage_three_is_negative() {
        // a_32 = 2/3 = alpha_32 (2/3 - 1/3)  =>  alpha_32 = 2
        // a_31 = 0 = alpha_31 (2/3) + alpha_32 a_21  =>  alpha_31 = -1
        let so = shu_osher_under_relation(&BuiltinTableau::Heun3.tableau()).unwrap();
        let al = so.alpha(2);
        assert!((al[0] + 1.0).abs() < 1e-15 && (al[1] - 2.0).abs() < 1e-15);
        let rep = validate_theorem1(&so);
        assert!(!rep.alpha_nonnegative && !rep.beta_nonnegative);
        assert!(rep.negative_entries.iter().any(|e| e.row == 3 && e.col == 1));
        assert!(rep.abscissa_ordering);
    }

    #[test]
    fn ssprk3_and_heun2_fail_ordering() {
        let rep = Theorem1Report::for_tableau(&BuiltinTableau::SspRk3.tableau());
        assert!(!rep.abscissa_ordering);
        assert!(!rep.all_pass());
        let rep = Theorem1Report::for_tableau(&BuiltinTableau::Heun2.tableau());
        assert!(!rep.abscissa_ordering);
        assert!(matches!(
            rep.representation_error,
            Some(Error::SingularShuOsher { row: 3, col: 2 })
        ));
    }

    #[test]
    fn representation_reconstructs_parent() {
        for bt in BuiltinTableau::ALL {
            let t = bt.tableau();
            let Ok(so) = shu_osher_under_relation(&t) else { continue };
            let (a, b) = so.reconstruct();
            for i in 0..t.stages() {
                for j in 0..i {
                    assert!((a[i][j] - t.a(i, j)).abs() < 1e-13, "{bt} a[{i}][{j}]");
                }
                assert!((b[i] - t.b()[i]).abs() < 1e-13, "{bt} b[{i}]");
            }
            for row in 1..so.rows() {
                assert!((so.alpha(row).iter().sum::<f64>() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn convexity_weights_limits() {
        let so = shu_osher_under_relation(&BuiltinTableau::Euler1.tableau()).unwrap();
        let (_, s0) = convexity_weights(&so, 1, 0.0);
        assert_eq!(s0, 1.0);
        let (_, big) = convexity_weights(&so, 1, 1e6);
        assert!(big < 1e-6);
        let so = shu_osher_under_relation(&BuiltinTableau::Heun3.tableau()).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..=400 {
            let lambda = if k == 0 { 0.0 } else { 10f64.powf(-4.0 + 8.0 * k as f64 / 400.0) };
            let (_, s) = convexity_weights(&so, 1, lambda);
            assert!(s <= prev + 1e-15);
            assert!(s <= 1.0 + 1e-15);
            prev = s;
        }
    }

    #[test]
    fn r1_routes_agree_and_decay() {
        for bt in BuiltinTableau::ALL {
            let t = bt.tableau();
            let d = r1_r2_diagnostic(&t, 0.0, 1.0, 1.0);
            assert_eq!(d.r1, 1.0);
            for lambda in [0.5, 3.0, 20.0, 80.0] {
                let fast = r1_r2_diagnostic(&t, lambda, 1.0, 1.0).r1;
                let slow = r1_literal(&t, lambda, 1.0, 1.0);
                assert!((fast - slow).abs() <= 1e-12 * fast.abs(), "{bt} {lambda}");
            }
            assert!(r1_r2_diagnostic(&t, 60.0, 1.0, 1.0).r1 <= 1e-8);
            assert!(r1_r2_diagnostic(&t, 60.0, 0.5, 1.0).r1 <= 1e-8);
        }
    }

    #[test]
    fn r1_is_exponential_times_polynomial() {
        // e^lambda R1 = 1 + (C lambda / mu) b (I - B)^{-1} e is a polynomial of
        // degree nu in lambda with leading coefficient b B^{nu-1} e.
        let t = BuiltinTableau::Heun3.tableau();
        for lambda in [10.0, 40.0, 100.0] {
            let r1 = r1_r2_diagnostic(&t, lambda, 1.0, 1.0).r1;
            let poly = 1.0 + lambda * (1.0 + lambda / 2.0 + lambda * lambda / 6.0);
            assert!((r1 * lambda.exp() / poly - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn r2_scale_vanishes_when_abscissae_stay_below_one() {
        let t = BuiltinTableau::Heun3.tableau();
        let h = 1e-3;
        let mut prev = f64::INFINITY;
        for lambda in [10.0, 50.0, 200.0, 1000.0] {
            let eps = h / lambda; // mu = 1
            let v = r1_r2_diagnostic(&t, lambda, 1.0, 1.0).r2_scale * eps;
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-100);
    }
}
