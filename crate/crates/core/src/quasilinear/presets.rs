//! Small-data problems used by the tests, the acceptance suite and the CLI.

use std::f64::consts::PI;
use std::sync::Arc;

use super::solver::SystemProblem;
use crate::systems::FluxSystem;

/// `(1 - cos(m pi (x + 1))) / 2`: vanishes with its derivative at both
/// endpoints, so zero inflow data is compatible to first order.
pub fn smooth_bump(mode: u32, x: f64) -> f64 {
    0.5 * (1.0 - (mode as f64 * PI * (x + 1.0)).cos())
}

fn smooth_bump_dx(mode: u32, x: f64) -> f64 {
    let k = mode as f64 * PI;
    0.5 * k * (k * (x + 1.0)).sin()
}

/// A named problem together with the norm its initial datum was scaled to.
#[derive(Clone)]
pub struct Preset {
    pub name: &'static str,
    pub problem: SystemProblem,
    /// `||V0||_{W1,inf}` after scaling.
    pub amplitude: f64,
}

/// Scale factor making `sup_c |phi_c| + sup_c |phi_c'|` equal to one, with
/// the sups taken over components as well as points.
fn w1inf_scale(components: &[(f64, u32)]) -> f64 {
    let m = 4097;
    let (mut sup, mut lip) = (0.0f64, 0.0f64);
    for j in 0..m {
        let x = -1.0 + 2.0 * j as f64 / (m - 1) as f64;
        for &(c, mode) in components {
            sup = sup.max((c * smooth_bump(mode, x)).abs());
            lip = lip.max((c * smooth_bump_dx(mode, x)).abs());
        }
    }
    1.0 / (sup + lip)
}

/// Burgers around `U_bar = 1` with `V0 = a phi_m / ||phi_m||_{W1,inf}` and
/// zero inflow.
pub fn burgers_small(amplitude: f64, mode: u32) -> Preset {
    let s = amplitude * w1inf_scale(&[(1.0, mode)]);
    Preset {
        name: "burgers-small",
        problem: SystemProblem {
            system: FluxSystem::burgers(),
            initial: Arc::new(move |x| vec![s * smooth_bump(mode, x)]),
            boundary: vec![Arc::new(|_| 0.0)],
            data_budget: 10.0 * amplitude.max(1e-300),
        },
        amplitude,
    }
}

/// The symmetric wave system with `V0 = a (phi_1, -phi_2)` scaled, zero
/// inflow on both families.
pub fn linear2_small(amplitude: f64) -> Preset {
    let s = amplitude * w1inf_scale(&[(1.0, 1), (1.0, 2)]);
    Preset {
        name: "linear2-small",
        problem: SystemProblem {
            system: FluxSystem::linear2(),
            initial: Arc::new(move |x| vec![s * smooth_bump(1, x), -s * smooth_bump(2, x)]),
            boundary: vec![Arc::new(|_| 0.0), Arc::new(|_| 0.0)],
            data_budget: 10.0 * amplitude.max(1e-300),
        },
        amplitude,
    }
}

/// Lagrangian gas dynamics around `(v, u) = (1, 0)` with
/// `V0 = a (phi_1, phi_2 / 2)` scaled and zero inflow.
pub fn psystem_small(amplitude: f64) -> Preset {
    let s = amplitude * w1inf_scale(&[(1.0, 1), (0.5, 2)]);
    Preset {
        name: "psystem-small",
        problem: SystemProblem {
            system: FluxSystem::psystem(),
            initial: Arc::new(move |x| vec![s * smooth_bump(1, x), 0.5 * s * smooth_bump(2, x)]),
            boundary: vec![Arc::new(|_| 0.0), Arc::new(|_| 0.0)],
            data_budget: 10.0 * amplitude.max(1e-300),
        },
        amplitude,
    }
}
