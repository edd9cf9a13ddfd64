use std::sync::Arc;

use inflow_core::field::Grid1D;
use inflow_core::quasilinear::*;
use inflow_core::systems::FluxSystem;
use inflow_core::Error;
use proptest::prelude::*;

fn cheap(nx: usize, horizon: f64) -> SystemConfig {
    SystemConfig { nx, horizon, ..SystemConfig::default() }
}

/// Riemann-invariant translation for the symmetric wave system with zero
/// inflow: `w+ = (v1 + v2)/2` moves right, `w- = (v1 - v2)/2` moves left.
fn wave_oracle(v0: &dyn Fn(f64) -> Vec<f64>, t: f64, x: f64) -> [f64; 2] {
    let wp = |y: f64| if y < -1.0 { 0.0 } else { let v = v0(y); 0.5 * (v[0] + v[1]) };
    let wm = |y: f64| if y > 1.0 { 0.0 } else { let v = v0(y); 0.5 * (v[0] - v[1]) };
    let (p, m) = (wp(x - t), wm(x + t));
    [p + m, p - m]
}

#[test]
fn wave_system_matches_translation() {
    let preset = linear2_small(1e-2);
    let (sol, report) = outer_solve(&preset.problem, &cheap(128, 3.0)).unwrap();
    assert!(report.converged_level.is_some());
    let mut err = 0.0f64;
    for k in 0..sol.v.nt {
        for j in 0..sol.v.nx() {
            let ex = wave_oracle(&*preset.problem.initial, sol.v.time(k), sol.v.grid.x(j));
            for c in 0..2 {
                err = err.max((sol.v.get(k, j, c) - ex[c]).abs());
            }
        }
    }
    assert!(err < 1e-3 * preset.amplitude, "error {err:.3e}");
}

#[test]
fn zero_data_gives_zero_solution() {
    let mut preset = burgers_small(0.0, 1);
    preset.problem.data_budget = 1.0;
    let (sol, report) = outer_solve(&preset.problem, &cheap(64, 2.0)).unwrap();
    assert_eq!(sol.v.sup_abs(), 0.0);
    assert_eq!(report.converged_level, Some(1));
}

/// Implicit characteristic solution of `u_t + u u_x = 0` with `u = 1` on the
/// inflow face, for data whose characteristics have not crossed.
fn burgers_oracle(u0: &dyn Fn(f64) -> f64, t: f64, x: f64) -> f64 {
    // the boundary characteristic from (0, -1) moves with speed 1
    if x <= -1.0 + t {
        return 0.0;
    }
    let (mut lo, mut hi) = (-1.0, x);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + (1.0 + u0(mid)) * t < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    u0(0.5 * (lo + hi))
}

#[test]
fn burgers_matches_implicit_characteristics() {
    let preset = burgers_small(1e-2, 1);
    let (sol, report) = outer_solve(&preset.problem, &cheap(256, 3.0)).unwrap();
    assert!(report.converged_level.is_some());
    let init = preset.problem.initial.clone();
    let u0 = move |x: f64| init(x)[0];
    let mut err = 0.0f64;
    for k in 0..sol.v.nt {
        for j in 0..sol.v.nx() {
            let ex = burgers_oracle(&u0, sol.v.time(k), sol.v.grid.x(j));
            err = err.max((sol.v.get(k, j, 0) - ex).abs());
        }
    }
    assert!(err < 1e-3 * preset.amplitude, "error {err:.3e}");
}

#[test]
fn derivative_slabs_consistent_with_differences() {
    // data flat to third order at both ends keep the derivatives smooth
    // across the corner characteristics
    let a = 5e-3;
    let problem = SystemProblem {
        system: FluxSystem::psystem(),
        initial: Arc::new(move |x: f64| {
            let p = (1.0 - x * x).powi(4);
            vec![a * p, 0.5 * a * p * x]
        }),
        boundary: vec![Arc::new(|_| 0.0), Arc::new(|_| 0.0)],
        data_budget: 1.0,
    };
    let mut prev = f64::INFINITY;
    for dt in [0.05, 0.025] {
        let (sol, _) = outer_solve(&problem, &SystemConfig { dt, ..cheap(128, 3.0) }).unwrap();
        let scale = sol.dx_v.sup_abs();
        let ex = sol.dx_v.sup_diff(&sol.v.space_derivative());
        let et = sol.dt_v.sup_diff(&sol.v.time_derivative());
        assert!(ex < 0.02 * scale, "dx mismatch {ex:.3e} vs {scale:.3e}");
        assert!(et < 0.02 * scale, "dt mismatch {et:.3e} vs {scale:.3e}");
        assert!(ex < prev);
        prev = ex;
        // residual of dt V + A(U + V) dx V
        let mut res = 0.0f64;
        for k in 0..sol.v.nt {
            for j in 0..sol.v.nx() {
                let av = apply_jacobian(&problem.system, sol.v.node(k, j), sol.dx_v.node(k, j)).unwrap();
                for c in 0..2 {
                    res = res.max((sol.dt_v.get(k, j, c) + av[c]).abs());
                }
            }
        }
        assert!(res < 1e-2 * scale, "residual {res:.3e}");
    }
}

#[test]
fn inner_and_outer_iterations_contract() {
    let preset = burgers_small(1e-2, 1);
    let (_, report) = outer_solve(&preset.problem, &cheap(128, 10.0)).unwrap();
    assert!(report.max_outer_ratio() <= 0.6, "{}", report.max_outer_ratio());
    assert!(report.max_inner_ratio() <= 0.6);
}

#[test]
fn stability_budget_violation_is_reported() {
    let preset = burgers_small(1e-2, 1);
    let cfg = SystemConfig { delta: 1e-4, ..cheap(64, 2.0) };
    match outer_solve(&preset.problem, &cfg) {
        Err(Error::StabilityBudget { level, norm, delta }) => {
            assert_eq!(level, 1);
            assert!(norm > delta);
        }
        other => panic!("expected budget error, got {:?}", other.map(|r| r.1.converged_level)),
    }
}

#[test]
fn incompatible_corner_is_rejected() {
    let problem = SystemProblem {
        system: FluxSystem::burgers(),
        initial: Arc::new(|_| vec![1e-3]),
        boundary: vec![Arc::new(|_| 0.0)],
        data_budget: 1.0,
    };
    assert!(matches!(outer_solve(&problem, &cheap(64, 2.0)), Err(Error::InvalidProblem(_))));
}

#[test]
fn shock_contrast_small_wave() {
    let a = 0.05;
    let t_star = periodic_shock_time(a, 1, 1 << 14);
    let predicted = 1.0 / (a * std::f64::consts::PI);
    assert!((t_star - predicted).abs() <= 0.02 * predicted);
    let cfg = SystemConfig { nx: 128, horizon: 3.0 * t_star, delta: f64::INFINITY, ..SystemConfig::default() };
    let r = shock_contrast(a, 1, &cfg).unwrap();
    assert!(r.growth <= 3.0, "growth {}", r.growth);
    // the periodic gradient blows up before t*
    let last = r.periodic_gradient_series.last().unwrap().1;
    assert!(last > 3.0 * r.initial_gradient);
}

fn slab_from(vals: &[f64], nt: usize, nx: usize) -> Slab {
    let mut s = Slab::zeros(Grid1D::new(nx), nt, 0.05, 1);
    s.data.copy_from_slice(vals);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mollifier_is_a_contraction_in_sup(vals in prop::collection::vec(-1.0f64..1.0, 21 * 17), level in 1usize..12) {
        let s = slab_from(&vals, 21, 17);
        let m = mollify(&s, level);
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        for v in &m.data {
            prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }

    #[test]
    fn mollifier_keeps_constants(c in -5.0f64..5.0, level in 1usize..12) {
        let s = slab_from(&vec![c; 21 * 17], 21, 17);
        let m = mollify(&s, level);
        prop_assert!(m.sup_diff(&s) <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn mollifier_keeps_affine_in_interior(a in -2.0f64..2.0, b in -2.0f64..2.0, level in 2usize..8) {
        let mut s = Slab::zeros(Grid1D::new(81), 61, 0.05, 1);
        for k in 0..s.nt {
            for j in 0..s.nx() {
                let v = a * s.time(k) + b * s.grid.x(j);
                s.set(k, j, 0, v);
            }
        }
        let m = mollify(&s, level);
        let r = 1.0 / level as f64;
        for k in 0..s.nt {
            for j in 0..s.nx() {
                let (t, x) = (s.time(k), s.grid.x(j));
                if t > r && t < s.horizon() - r && x.abs() < 1.0 - r {
                    prop_assert!((m.get(k, j, 0) - s.get(k, j, 0)).abs() < 1e-10);
                }
            }
        }
    }
}
