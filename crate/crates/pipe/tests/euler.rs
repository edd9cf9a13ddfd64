use inflow_pipe::boundary::{pulse_shape, PipeBoundaryData};
use inflow_pipe::euler::{euler_solve, EulerConfig};
use inflow_pipe::grid::{Grid3, VectorField3};
use inflow_pipe::presets::{compat_vectors, plug_pulse, product_cosine, zero_case};
use inflow_pipe::profile::ShearProfile;
use inflow_pipe::PipeError;

fn short(horizon: f64) -> EulerConfig {
    EulerConfig { horizon, dt: 0.1, ..EulerConfig::default() }
}

#[test]
fn zero_perturbation_stays_zero() {
    let g = Grid3::new(8);
    let c = zero_case(g, ShearProfile::ProductCosine { c: 2.0 });
    let s = euler_solve(&c.profile, &c.bdata, &c.v0, &c.omega0, &short(1.0)).unwrap();
    let r = &s.report;
    assert!(r.converged);
    assert_eq!(s.v.sup_lp(4.0), 0.0);
    assert_eq!(s.omega.sup_lp(4.0), 0.0);
    for m in [&r.div_omega, &r.tangential, &r.momentum] {
        assert_eq!(m.value, 0.0);
        assert!(m.passed);
    }
}

#[test]
fn incompatible_data_is_rejected() {
    let g = Grid3::new(8);
    for vec in compat_vectors(g).into_iter().filter(|v| !v.expect_pass) {
        let c = vec.case;
        let err = euler_solve(&c.profile, &c.bdata, &c.v0, &c.omega0, &short(1.0)).unwrap_err();
        assert!(matches!(err, PipeError::Precondition(_)), "{}: {err}", vec.name);
    }
}

#[test]
fn tiny_budget_is_exceeded() {
    let g = Grid3::new(8);
    let c = product_cosine(g, 1e-3);
    let cfg = EulerConfig { delta: 1e-9, ..short(0.5) };
    let err = euler_solve(&c.profile, &c.bdata, &c.v0, &c.omega0, &cfg).unwrap_err();
    assert!(matches!(err, PipeError::StabilityBudget { .. }), "{err}");
}

#[test]
fn plug_pulse_moves_rigidly() {
    let g = Grid3::new(8);
    let a = 1e-3;
    let c = plug_pulse(g, a);
    let s = euler_solve(&c.profile, &c.bdata, &c.v0, &c.omega0, &short(3.0)).unwrap();
    assert!(s.report.converged);
    for k in 0..s.v.levels {
        let eta = a * pulse_shape(s.v.time(k));
        let expect = VectorField3::from_fn(g, |_| [eta, 0.0, 0.0]);
        assert!(s.v.field(k).sup_diff(&expect) < 1e-12);
    }
    assert_eq!(s.omega.sup_lp(4.0), 0.0);
    assert!(s.report.momentum.value < 1e-10, "{}", s.report.momentum.value);
}

#[test]
fn steady_plug_has_no_residual() {
    let g = Grid3::new(8);
    let c = zero_case(g, ShearProfile::Plug { c: 1.0 });
    let plug = VectorField3::from_fn(g, |_| [0.5, 0.0, 0.0]);
    let s = euler_solve(&c.profile, &PipeBoundaryData::plug(0.5), &plug, &c.omega0, &short(1.0)).unwrap();
    assert!(s.v.field(s.v.levels - 1).sup_diff(&plug) < 1e-12);
    assert!(s.report.momentum.value < 1e-12);
    assert!(s.report.max_outer_ratio <= 0.6);
}

#[test]
fn small_swirl_on_a_shear_converges_on_a_short_horizon() {
    let g = Grid3::new(8);
    let c = product_cosine(g, 1e-3);
    let s = euler_solve(&c.profile, &c.bdata, &c.v0, &c.omega0, &short(0.5)).unwrap();
    let r = &s.report;
    assert!(r.converged, "{:?}", r.omega_distances);
    assert!(r.tangential.passed && r.momentum.passed);
    assert!(r.estimate_constant.is_finite() && r.estimate_constant > 0.0);
}
