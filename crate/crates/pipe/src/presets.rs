//! Ready-made data sets: the shear profiles with compatible perturbations,
//! and the hand-built vectors for the compatibility checker.

use std::f64::consts::PI;

use crate::boundary::PipeBoundaryData;
use crate::grid::{Grid3, VectorField3};
use crate::profile::ShearProfile;

#[derive(Debug, Clone)]
pub struct PipeCase {
    pub profile: ShearProfile,
    pub bdata: PipeBoundaryData,
    pub v0: VectorField3,
    pub omega0: VectorField3,
}

/// `v0 = a (0, d3 phi, -d2 phi)` with `phi = (1 - x1^2)^3 sin(pi x2) sin(pi x3)`
/// and its exact curl. Both vanish with their first `x1` derivative on the
/// end faces, and the tangential vorticity vanishes on the walls.
pub fn swirl_initial(grid: Grid3, amplitude: f64) -> (VectorField3, VectorField3) {
    let a = amplitude;
    let v0 = VectorField3::from_fn(grid, |x| {
        let q = (1.0 - x[0] * x[0]).powi(3);
        let (s2, c2) = (PI * x[1]).sin_cos();
        let (s3, c3) = (PI * x[2]).sin_cos();
        [0.0, a * q * s2 * PI * c3, -a * q * PI * c2 * s3]
    });
    let omega0 = VectorField3::from_fn(grid, |x| {
        let r = 1.0 - x[0] * x[0];
        let q = r.powi(3);
        let dq = -6.0 * x[0] * r * r;
        let (s2, c2) = (PI * x[1]).sin_cos();
        let (s3, c3) = (PI * x[2]).sin_cos();
        [2.0 * PI * PI * a * q * s2 * s3, a * dq * PI * c2 * s3, a * dq * s2 * PI * c3]
    });
    (v0, omega0)
}

/// `U = 2 + cos(pi x2) cos(pi x3)` with a swirl and an inflow pulse of size
/// `amplitude`.
pub fn product_cosine(grid: Grid3, amplitude: f64) -> PipeCase {
    let (v0, omega0) = swirl_initial(grid, amplitude);
    PipeCase { profile: ShearProfile::ProductCosine { c: 2.0 }, bdata: PipeBoundaryData::pulse(amplitude), v0, omega0 }
}

/// Unit plug flow with an inflow pulse and no initial perturbation.
pub fn plug_pulse(grid: Grid3, amplitude: f64) -> PipeCase {
    PipeCase {
        profile: ShearProfile::Plug { c: 1.0 },
        bdata: PipeBoundaryData::pulse(amplitude),
        v0: VectorField3::zeros(grid),
        omega0: VectorField3::zeros(grid),
    }
}

pub fn zero_case(grid: Grid3, profile: ShearProfile) -> PipeCase {
    PipeCase {
        profile,
        bdata: PipeBoundaryData::zero(),
        v0: VectorField3::zeros(grid),
        omega0: VectorField3::zeros(grid),
    }
}

/// A hand-built input for the compatibility checker and the verdict it must
/// produce.
#[derive(Debug, Clone)]
pub struct CompatVector {
    pub name: &'static str,
    pub case: PipeCase,
    pub expect_pass: bool,
    /// The condition that decides the verdict and its expected residual.
    pub condition: Option<(&'static str, f64)>,
}

pub fn compat_vectors(grid: Grid3) -> Vec<CompatVector> {
    let profile = ShearProfile::ProductCosine { c: 2.0 };
    let zero = zero_case(grid, profile);
    let mut unbalanced = zero.clone();
    unbalanced.bdata = PipeBoundaryData::new(|_, _, _| 1.0, |_, _, _| 0.0, |_, _, _| [0.0; 3]);
    let mut normal = zero.clone();
    normal.bdata = PipeBoundaryData::new(|_, _, _| 0.0, |_, _, _| 0.0, |_, _, _| [0.1, 0.0, 0.0]);
    vec![
        CompatVector { name: "zero-perturbation", case: zero, expect_pass: true, condition: None },
        CompatVector {
            name: "unbalanced-flux",
            case: unbalanced,
            expect_pass: false,
            condition: Some(("flux_balance", 4.0)),
        },
        CompatVector {
            name: "normal-inflow-vorticity",
            case: normal,
            expect_pass: false,
            condition: Some(("inflow_vorticity_normal_zero", 0.1)),
        },
    ]
}

/// `u = (2 + cos(pi x2) cos(pi x3), d3 psi, -d2 psi)` with
/// `psi = 0.2 (1 + sin(t) / 2) (1 - x2^2)^2 (1 - x3^2)^2`. Divergence free
/// and tangent to the lateral walls.
pub fn wall_tangent_flow(t: f64, x: [f64; 3]) -> [f64; 3] {
    let s = 0.2 * (1.0 + 0.5 * t.sin());
    let (a, b) = (1.0 - x[1] * x[1], 1.0 - x[2] * x[2]);
    let u1 = 2.0 + (PI * x[1]).cos() * (PI * x[2]).cos();
    [u1, s * a * a * 2.0 * b * (-2.0 * x[2]), -s * 2.0 * a * (-2.0 * x[1]) * b * b]
}

/// `v = (0, d3 phi, -d2 phi)` with `phi = sin(pi x1) sin(pi x2) sin(pi x3)`
/// and its exact curl. `v` has zero normal part on every face.
pub fn manufactured_divcurl(grid: Grid3) -> (VectorField3, VectorField3) {
    let v = VectorField3::from_fn(grid, |x| {
        let s1 = (PI * x[0]).sin();
        let (s2, c2) = (PI * x[1]).sin_cos();
        let (s3, c3) = (PI * x[2]).sin_cos();
        [0.0, PI * s1 * s2 * c3, -PI * s1 * c2 * s3]
    });
    let w = VectorField3::from_fn(grid, |x| {
        let (s1, c1) = (PI * x[0]).sin_cos();
        let (s2, c2) = (PI * x[1]).sin_cos();
        let (s3, c3) = (PI * x[2]).sin_cos();
        [2.0 * PI * PI * s1 * s2 * s3, PI * PI * c1 * c2 * s3, PI * PI * c1 * s2 * c3]
    });
    (v, w)
}
