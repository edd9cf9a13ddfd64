use inflow_pipe::grid::Grid3;
use inflow_pipe::trace::{backward_exit, lateral_invariance_check, lateral_samples, Region3};
use inflow_pipe::transport::{
    transport3d_run, transport3d_solve, weighted_lp_decay_check, SmallnessBudget3D, Transport3D,
};
use inflow_pipe::PipeError;

fn plug(_: f64, _: [f64; 3]) -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn bump(x: [f64; 3]) -> f64 {
    let s = (1.0 - x[0] * x[0]).max(0.0);
    s * s * (0.5 * std::f64::consts::PI * x[1]).cos() * (1.0 + 0.3 * x[2])
}

fn budget(p: &Transport3D, g: &Grid3, horizon: f64) -> SmallnessBudget3D {
    SmallnessBudget3D::evaluate(p.velocity.as_ref(), g, horizon, 5, 4.0, 1.0)
}

/// psi = 0.1 (1 - x2^2)^2 (1 - x3^2)^2 and u = (1, d3 psi, -d2 psi).
fn swirl(_: f64, x: [f64; 3]) -> [f64; 3] {
    let (a, b) = (1.0 - x[1] * x[1], 1.0 - x[2] * x[2]);
    [1.0, 0.1 * a * a * 2.0 * b * (-2.0 * x[2]), -0.1 * 2.0 * a * (-2.0 * x[1]) * b * b]
}

#[test]
fn constant_speed_translates_initial_data() {
    let g = Grid3::new(9);
    let mut prob = Transport3D::new(plug).with_initial(bump);
    prob.eps = 0.0;
    let b = budget(&prob, &g, 1.0);
    let t = 0.7;
    let sol = transport3d_solve(&prob, &g, &b, t).unwrap();
    let mut err = 0.0f64;
    for idx in 0..g.len() {
        let x = g.point(idx);
        let exact = if x[0] - t > -1.0 { bump([x[0] - t, x[1], x[2]]) } else { 0.0 };
        err = err.max((sol.field.data[idx] - exact).abs());
    }
    assert!(err < 1e-9, "{err}");
    assert!(sol.regions[0] > 0 && sol.regions[1] > 0);

    // the wall regularization moves feet by about eps t
    let prob = Transport3D::new(plug).with_initial(bump);
    let reg = transport3d_solve(&prob, &g, &b, t).unwrap();
    let gap = reg.field.data.iter().zip(&sol.field.data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap > 0.0 && gap < 1e-5, "{gap}");
}

#[test]
fn zero_data_gives_zero() {
    let g = Grid3::new(5);
    let prob = Transport3D::new(swirl);
    let b = SmallnessBudget3D::evaluate(prob.velocity.as_ref(), &g, 1.0, 3, 4.0, f64::INFINITY);
    let sol = transport3d_solve(&prob, &g, &b, 1.3).unwrap();
    assert!(sol.field.data.iter().all(|&v| v == 0.0));
}

#[test]
fn plug_flow_fills_from_inflow_face() {
    let g = Grid3::new(9);
    let prob = Transport3D::new(plug).with_boundary(|_, _, _| 1.0);
    let b = budget(&prob, &g, 1.0);
    let t = 0.6;
    let sol = transport3d_solve(&prob, &g, &b, t).unwrap();
    for idx in 0..g.len() {
        let x = g.point(idx);
        let exact = if x[0] < -1.0 + t { 1.0 } else { 0.0 };
        assert_eq!(sol.field.data[idx], exact, "at {x:?}");
    }
}

#[test]
fn constant_forcing_saturates() {
    let g = Grid3::new(9);
    let prob = Transport3D::new(plug).with_forcing(|_, _| 1.0);
    let b = budget(&prob, &g, 2.0);
    for t in [0.3, 1.1, 2.5] {
        let sol = transport3d_solve(&prob, &g, &b, t).unwrap();
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!((sol.field.data[idx] - t.min(x[0] + 1.0)).abs() < 1e-8);
        }
    }
}

#[test]
fn slow_speed_and_large_gradients_are_rejected() {
    let g = Grid3::new(5);
    let prob = Transport3D::new(plug);
    let mut b = budget(&prob, &g, 1.0);
    b.c1 = 2.0;
    b.rhs = b.delta * 16.0;
    assert!(matches!(transport3d_solve(&prob, &g, &b, 0.5), Err(PipeError::Precondition(_))));

    let shear = Transport3D::new(|t, x: [f64; 3]| [1.0 + 0.5 * (t + x[1]).sin(), 0.0, 0.0]);
    let b = SmallnessBudget3D::evaluate(shear.velocity.as_ref(), &g, 1.0, 5, 4.0, 1e-3);
    assert!(!b.holds());
    assert!(matches!(transport3d_solve(&shear, &g, &b, 0.5), Err(PipeError::Precondition(_))));
}

#[test]
fn backward_exit_classifies_regions() {
    let opts = Transport3D::new(plug).ode;
    let e = backward_exit(&plug, None, 0.5, [0.0, 0.2, 0.3], &opts).unwrap();
    assert_eq!(e.region, Region3::FromInitial);
    assert!((e.x_b[0] + 0.5).abs() < 1e-10);
    let e = backward_exit(&plug, None, 1.5, [0.0, 0.2, 0.3], &opts).unwrap();
    assert_eq!(e.region, Region3::FromBoundary);
    assert!((e.t_b - 0.5).abs() < 1e-8);
    let e = backward_exit(&plug, None, 1.0, [0.0, 0.2, 0.3], &opts).unwrap();
    assert_eq!(e.region, Region3::Corner);
}

#[test]
fn wall_characteristics_stay_on_the_walls() {
    let r = lateral_invariance_check(&plug, 40, 10.0, 20, 7).unwrap();
    assert_eq!(r.max_drift, 0.0);
    let r = lateral_invariance_check(&swirl, 200, 10.0, 40, 7).unwrap();
    assert!(r.max_drift <= 1e-8, "{}", r.max_drift);
}

#[test]
fn injected_normal_velocity_is_detected() {
    let leaky = |t: f64, x: [f64; 3]| {
        let mut u = swirl(t, x);
        u[1] += 1e-3;
        u
    };
    let r = lateral_invariance_check(&leaky, 200, 10.0, 40, 7).unwrap();
    assert!(r.max_drift > 1e-4, "{}", r.max_drift);
    // first-order growth: the drift up to time t is close to 1e-3 t early on
    let (t1, d1) = r.series[0];
    assert!((d1 - 1e-3 * t1).abs() < 0.2 * 1e-3 * t1, "{d1} vs {}", 1e-3 * t1);
    assert!(r.max_drift <= 2.0e-3 * 1.05);
}

#[test]
fn wall_samples_are_deterministic() {
    assert_eq!(lateral_samples(12, 3), lateral_samples(12, 3));
    for (x, axis, side) in lateral_samples(40, 1) {
        assert_eq!(x[axis], side);
    }
}

#[test]
fn weighted_norm_flushes_and_obeys_bound() {
    let g = Grid3::new(9);
    let prob = Transport3D::new(plug).with_initial(bump);
    let b = budget(&prob, &g, 3.0);
    let times: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let run = transport3d_run(&prob, &g, &b, &times).unwrap();
    let rep = weighted_lp_decay_check(&run, &prob, 4.0, 1.0, 4.0);
    assert!(rep.holds);
    assert!((rep.series[0].1 - rep.initial_term).abs() < 1e-12 * rep.initial_term);
    for &(t, v) in &rep.series {
        if t >= 2.0 {
            assert!(v < 1e-20, "t = {t}: {v}");
        }
    }
    let zero = Transport3D::new(plug);
    let run = transport3d_run(&zero, &g, &b, &times).unwrap();
    let rep = weighted_lp_decay_check(&run, &zero, 4.0, 1.0, 4.0);
    assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
    assert!(rep.holds);
}

#[test]
fn saturated_forcing_obeys_bound() {
    let g = Grid3::new(17);
    let prob = Transport3D::new(plug).with_forcing(|_, _| 1.0);
    let b = budget(&prob, &g, 4.0);
    let run = transport3d_run(&prob, &g, &b, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let rep = weighted_lp_decay_check(&run, &prob, 4.0, 1.0, 4.0);
    assert!(rep.holds);
    // steady profile x1 + 1: 4 e^4 int_0^2 s^4 e^{-4s} ds
    let exact = 4.0 * 4f64.exp() * {
        let m = 20000;
        let h = 2.0 / m as f64;
        (0..=m)
            .map(|k| {
                let s = k as f64 * h;
                let w = if k == 0 || k == m { 0.5 } else { 1.0 };
                w * h * s.powi(4) * (-4.0 * s).exp()
            })
            .sum::<f64>()
    };
    assert!((rep.lhs - exact).abs() < 0.02 * exact, "{} vs {exact}", rep.lhs);
    assert!(rep.lhs <= rep.forcing_term);
}
