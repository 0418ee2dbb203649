use std::f64::consts::PI;

use exprk_core::collision::{CollisionOperator, SpectralMaxwell};
use exprk_core::euler_ref::{kinetic_flux_step, EulerState};
use exprk_core::integrators::{exprk_f_full_step, macro_euler_rk, step, Scheme, StepContext};
use exprk_core::phase_space::{
    l1_distance, moments, Boundary, EpsilonField, MacroState, PhaseField, SpatialGrid, VelocityGrid,
};
use exprk_core::tableau::{shu_osher_under_relation, BuiltinTableau, Tableau};
use exprk_core::transport::{TransportOrder, TransportScheme};

fn two_stream(nx: usize, nv: usize) -> PhaseField {
    let sg = SpatialGrid::new(nx, 0.0, 1.0, Boundary::Periodic).unwrap();
    let vg = VelocityGrid::new(nv, 8.0).unwrap();
    PhaseField::from_fn(sg, vg, |x, vx, vy| {
        let rho0 = (2.0 + (2.0 * PI * x).sin()) / 2.0;
        let t0 = (5.0 + 2.0 * (2.0 * PI * x).cos()) / 20.0;
        let g = |ux: f64, uy: f64| (-((vx - ux).powi(2) + (vy - uy).powi(2)) / t0).exp();
        0.5 * rho0 * (g(0.75, -0.75) + g(-0.75, 0.75))
    })
}

fn context(tab: Tableau, nx: usize, eps: f64, h: f64) -> StepContext {
    StepContext::new(
        CollisionOperator::bgk(1.0).unwrap(),
        TransportScheme::new(TransportOrder::Weno5),
        tab,
        EpsilonField::constant(nx, eps).unwrap(),
        1.05,
        h,
    )
    .unwrap()
}

/// Classical RK step of `f' = Q(f)/eps - v f_x` with the same tableau.
fn classical_rk(tab: &Tableau, f: &PhaseField, eps: f64, h: f64) -> PhaseField {
    let op = CollisionOperator::bgk(1.0).unwrap();
    let ts = TransportScheme::new(TransportOrder::Weno5);
    let rhs = |g: &PhaseField| {
        let mut k = op.apply_q(g).unwrap();
        k.scale(1.0 / eps);
        k.axpy(-1.0, &ts.divergence(g).unwrap());
        k
    };
    let nu = tab.stages();
    let mut ks: Vec<PhaseField> = Vec::new();
    for row in 0..=nu {
        let (coeffs, _) = tab.row(row);
        let mut y = f.clone();
        for (j, a) in coeffs.iter().enumerate() {
            if *a != 0.0 {
                y.axpy(h * a, &ks[j]);
            }
        }
        if row == nu {
            return y;
        }
        ks.push(rhs(&y));
    }
    unreachable!()
}

#[test]
fn weak_collisions_reduce_to_classical_rk() {
    let f = two_stream(24, 16);
    let eps = 1e3;
    for (bt, p) in [(BuiltinTableau::Midpoint2, 2), (BuiltinTableau::Heun3, 3)] {
        let tab = bt.tableau();
        for scheme in [Scheme::ExpRkF, Scheme::ExpRkV] {
            let gap = |h: f64| {
                let ctx = context(tab.clone(), 24, eps, h);
                let a = step(scheme, &ctx, &f).unwrap().f_next;
                let b = classical_rk(&tab, &f, eps, h);
                l1_distance(&a, &b).unwrap()
            };
            let (g1, g2) = (gap(4e-3), gap(2e-3));
            let ratio = g1 / g2;
            let expected = 2f64.powi(p + 1);
            assert!(
                ratio > 0.75 * expected && ratio < 1.5 * expected,
                "{bt} {scheme:?}: ratio {ratio} vs {expected} ({g1:e}, {g2:e})"
            );
        }
    }
}

#[test]
fn euler1_positivity_under_certified_step() {
    let tab = BuiltinTableau::Euler1.tableau();
    let so = shu_osher_under_relation(&tab).unwrap();
    assert!(so.negative_entries().is_empty());
    let f = two_stream(32, 32);
    // largest h with f - h div(f) >= 0, found by bisection
    let ts = TransportScheme::new(TransportOrder::Weno5);
    let div = ts.divergence(&f).unwrap();
    let nonneg = |h: f64| {
        let mut g = f.clone();
        g.axpy(-h, &div);
        g.min() >= 0.0
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if nonneg(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h_star = so.step_ratio().min(1.0) * lo;
    assert!(h_star > 0.0);
    for eps in [1.0, 1e-3, 1e-6] {
        let op = CollisionOperator::bgk(1.0).unwrap();
        let mu = op.mu_star(&f, 1.05).unwrap();
        let ctx = StepContext::new(op, ts, tab.clone(), EpsilonField::constant(32, eps).unwrap(), mu, h_star).unwrap();
        let out = exprk_f_full_step(&ctx, &f).unwrap();
        assert!(out.f_next.min() >= -1e-14 * out.f_next.max(), "eps {eps}: {}", out.f_next.min());
    }
}

#[test]
fn kinetic_reference_is_consistent_with_macro_rk() {
    // one step of each Euler discretization; discrepancy shrinks with dx
    let gap = |n: usize| {
        let sg = SpatialGrid::new(n, 0.0, 1.0, Boundary::Periodic).unwrap();
        let mut m = MacroState::zeros(n);
        for i in 0..n {
            let x = sg.center(i);
            m.set_primitive(i, 1.0 + 0.2 * (2.0 * PI * x).sin(), [0.1, 0.0], 1.0);
        }
        let h = 0.2 * sg.spacing();
        let a = macro_euler_rk(&BuiltinTableau::Heun3.tableau(), &m, &sg, h, TransportOrder::Weno5).unwrap().next;
        let b = kinetic_flux_step(&EulerState::new(sg, m.clone()).unwrap(), h).unwrap().state;
        let d: f64 = (0..n).map(|i| (a.rho[i] - b.rho[i]).abs()).sum::<f64>() * sg.spacing();
        d / h
    };
    let (g1, g2) = (gap(50), gap(100));
    assert!(g2 < g1 && (g1 / g2) > 1.6, "{g1:e} {g2:e}");
}

#[test]
fn spectral_operator_runs_in_a_step() {
    let f = two_stream(8, 32);
    let vg = *f.velocity_grid();
    let op = CollisionOperator::SpectralMaxwell(SpectralMaxwell::new(1.0, &vg).unwrap());
    let mu = op.mu_star(&f, 1.05).unwrap();
    let ctx = StepContext::new(
        op,
        TransportScheme::new(TransportOrder::Weno3),
        BuiltinTableau::Midpoint2.tableau(),
        EpsilonField::constant(8, 1e-2).unwrap(),
        mu,
        1e-3,
    )
    .unwrap();
    let mass = |g: &PhaseField| moments(g).unwrap().rho.iter().sum::<f64>();
    for scheme in [Scheme::ExpRkF, Scheme::ExpRkV] {
        let out = step(scheme, &ctx, &f).unwrap();
        assert!((mass(&out.f_next) - mass(&f)).abs() < 1e-11 * mass(&f));
    }
}
