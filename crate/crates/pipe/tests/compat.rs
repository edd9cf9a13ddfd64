use inflow_pipe::boundary::PipeBoundaryData;
use inflow_pipe::compat::{check_compatibility, CompatOptions};
use inflow_pipe::grid::{Grid3, VectorField3};
use inflow_pipe::presets::{compat_vectors, product_cosine};
use inflow_pipe::profile::ShearProfile;

fn opts() -> CompatOptions {
    CompatOptions { time_samples: 6, face_samples: 33, ..CompatOptions::default() }
}

#[test]
fn hand_built_vectors_get_documented_verdicts() {
    let g = Grid3::new(16);
    for vec in compat_vectors(g) {
        let c = &vec.case;
        let rep = check_compatibility(&c.profile, &c.bdata, &c.v0, &c.omega0, &opts());
        assert_eq!(rep.passed(), vec.expect_pass, "{}: {:?}", vec.name, rep.failures());
        if let Some((name, residual)) = vec.condition {
            let cond = rep.get(name).unwrap();
            assert!(!cond.passed);
            assert!((cond.residual - residual).abs() < 1e-12, "{name}: {}", cond.residual);
        }
    }
}

#[test]
fn swirl_with_pulse_is_compatible() {
    let g = Grid3::new(16);
    let c = product_cosine(g, 1e-3);
    let rep = check_compatibility(&c.profile, &c.bdata, &c.v0, &c.omega0, &opts());
    assert!(rep.passed(), "{:?}", rep.conditions);
    assert_eq!(rep.conditions.len(), 12);
}

#[test]
fn wall_crossing_velocity_is_flagged() {
    let g = Grid3::new(12);
    let v0 = VectorField3::from_fn(g, |x| [0.0, 1e-3 * (1.0 - x[0] * x[0]), 0.0]);
    let omega0 = VectorField3::from_fn(g, |x| [0.0, 0.0, 2e-3 * x[0]]);
    let rep = check_compatibility(&ShearProfile::Plug { c: 1.0 }, &PipeBoundaryData::zero(), &v0, &omega0, &opts());
    let failures = rep.failures();
    assert!(failures.contains(&"v0_normal_lateral"));
    assert!(!failures.contains(&"div_v0"));
}

#[test]
fn tangential_inflow_vorticity_on_the_edges_is_flagged() {
    let g = Grid3::new(12);
    let zero = VectorField3::zeros(g);
    let profile = ShearProfile::CosineShear { c: 2.0, m: 1 };
    let rep = check_compatibility(&profile, &PipeBoundaryData::zero(), &zero, &zero, &opts());
    assert!(rep.passed(), "{:?}", rep.failures());
    let bdata = PipeBoundaryData::new(|_, _, _| 0.0, |_, _, _| 0.0, |_, x2, _| [0.0, 0.0, 0.01 * x2]);
    let rep = check_compatibility(&profile, &bdata, &zero, &zero, &opts());
    let cond = rep.get("inflow_vorticity_edge_tangential").unwrap();
    assert!(!cond.passed && (cond.residual - 0.01).abs() < 1e-12);
    assert!(rep.get("inflow_tangential_divergence").unwrap().passed);
}
