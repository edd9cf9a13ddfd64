use inflow_core::characteristics::*;
use proptest::prelude::*;

/// Closed-form flow of `X' = a + b X` through `(t, x)`, evaluated at `s`.
fn affine_flow(a: f64, b: f64, t: f64, x: f64, s: f64) -> f64 {
    if b == 0.0 {
        return x + a * (s - t);
    }
    (x + a / b) * (b * (s - t)).exp() - a / b
}

/// Time at which the affine flow through `(t, x)` hits `target` going back.
fn affine_hit_time(a: f64, b: f64, t: f64, x: f64, target: f64) -> f64 {
    if b == 0.0 {
        return t - (x - target) / a;
    }
    t + ((target + a / b) / (x + a / b)).ln() / b
}

#[test]
fn affine_exit_matches_closed_form() {
    let (a, b) = (1.0, 0.4);
    let s = SpeedField1D::affine(a, b);
    for &(t, x) in &[(0.3, 0.9), (2.0, 0.1), (0.8, -0.5), (5.0, 1.0)] {
        let r = backward_exit(&s, t, x, 1e-9).unwrap();
        let hit = affine_hit_time(a, b, t, x, -1.0);
        if hit > 0.0 {
            assert_eq!(r.region, Region::FromBoundary);
            assert!((r.t_b - hit).abs() < 1e-10, "t_b {} vs {}", r.t_b, hit);
        } else {
            assert_eq!(r.region, Region::FromInitial);
            assert!((r.x_b - affine_flow(a, b, t, x, 0.0)).abs() < 1e-10);
        }
    }
}

#[test]
fn leftward_affine_exit() {
    let (a, b) = (-1.5, 0.3);
    let s = SpeedField1D::affine(a, b);
    let (t, x) = (1.0, -0.2);
    let r = backward_exit(&s, t, x, 1e-9).unwrap();
    assert_eq!(r.region, Region::FromBoundary);
    assert_eq!(r.x_b, 1.0);
    assert!((r.t_b - affine_hit_time(a, b, t, x, 1.0)).abs() < 1e-10);
}

#[test]
fn exit_time_is_lipschitz_in_position() {
    // |d t_b / dx| <= exp(L t) / lambda_m for speeds with Lipschitz constant L
    let s = SpeedField1D::new(|t, x| 1.2 + 0.3 * (x + t).sin(), 0.9, 0.3, 1.0, false);
    let t = 3.0;
    let h = 1e-4;
    let bound = (0.3f64 * t).exp() / 0.9;
    let mut x = -0.99;
    while x < 0.99 {
        let a = backward_exit(&s, t, x, 1e-12).unwrap();
        let b = backward_exit(&s, t, x + h, 1e-12).unwrap();
        if a.region == Region::FromBoundary && b.region == Region::FromBoundary {
            assert!(((b.t_b - a.t_b) / h).abs() <= bound);
        }
        x += 0.05;
    }
}

fn speed_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    // lambda = sign (c + e sin(x + w t)), e < c so the sign is fixed
    (0.5f64..2.0, 0.0f64..0.4, 0.0f64..2.0, prop_oneof![Just(1.0), Just(-1.0)])
}

fn build((c, e, w, sign): (f64, f64, f64, f64)) -> SpeedField1D {
    SpeedField1D::new(move |t, x| sign * (c + e * (x + w * t).sin()), c - e, e, sign, w == 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exit_point_consistency(params in speed_strategy(), t in 0.0f64..4.0, x in -1.0f64..1.0) {
        let s = build(params);
        let r = backward_exit(&s, t, x, 1e-12).unwrap();
        // exactly one of t_b = 0, x_b = inflow
        prop_assert!(r.t_b == 0.0 || r.x_b == s.inflow_point());
        if r.region != Region::Corner {
            let fwd = flow_with_forcing(&s, None, r.t_b, r.x_b, t).unwrap();
            prop_assert!((fwd.x - x).abs() < 1e-9, "forward {} vs {}", fwd.x, x);
        }
    }

    #[test]
    fn backward_flow_is_monotone(params in speed_strategy(), t in 0.0f64..3.0, x1 in -1.0f64..1.0, dx in 0.0f64..0.5, tau_frac in 0.0f64..1.0) {
        let s = build(params);
        let x2 = (x1 + dx).min(1.0);
        let tau = t * tau_frac;
        let a = trace(&s, t, x1, tau).unwrap();
        let b = trace(&s, t, x2, tau).unwrap();
        if !a.exited && !b.exited {
            prop_assert!(a.x <= b.x + 1e-12);
        }
    }

    #[test]
    fn trace_stays_in_interval(params in speed_strategy(), t in 0.0f64..3.0, x in -1.0f64..1.0) {
        let s = build(params);
        let p = trace(&s, t, x, 0.0).unwrap();
        prop_assert!((-1.0..=1.0).contains(&p.x));
        prop_assert!(p.tau >= 0.0 && p.tau <= t);
    }
}
