//! Characteristics of `x' = u(t, x)` in the pipe.
//!
//! On the lateral walls `u . nu = 0`, so characteristics started there stay
//! there and the backward exit through the inflow face is tangential. The
//! regularized field `u + eps (0, x2, x3)` points strictly outward on the
//! walls, which makes every backward trace move inward.

use std::sync::Arc;

use inflow_core::ode::{dopri5, OdeOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PipeError, Result};

pub trait VelocityField: Send + Sync {
    fn velocity(&self, t: f64, x: [f64; 3]) -> [f64; 3];
}

impl<F> VelocityField for F
where
    F: Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync,
{
    fn velocity(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        self(t, x)
    }
}

/// `u + eps (0, x2, x3)`.
pub struct Regularized {
    pub inner: Arc<dyn VelocityField>,
    pub eps: f64,
}

impl VelocityField for Regularized {
    fn velocity(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let u = self.inner.velocity(t, x);
        [u[0], u[1] + self.eps * x[1], u[2] + self.eps * x[2]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region3 {
    /// The backward characteristic reaches `t = 0` inside the pipe.
    FromInitial,
    /// The backward characteristic leaves through the inflow face at `t_b > 0`.
    FromBoundary,
    /// The characteristic issued from the inflow face at `t = 0`.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exit3 {
    pub t_b: f64,
    pub x_b: [f64; 3],
    pub region: Region3,
    /// `∫_{t_b}^{t} h(s, X(s)) ds` when a forcing is supplied.
    pub integral: f64,
}

pub const CORNER_TOL: f64 = 1e-9;

fn clamp_box(x: [f64; 3]) -> [f64; 3] {
    [x[0].clamp(-1.0, 1.0), x[1].clamp(-1.0, 1.0), x[2].clamp(-1.0, 1.0)]
}

/// Trace backward from `(t, x)` to the first of `t = 0` or the inflow face,
/// integrating `forcing` along the way.
pub fn backward_exit(
    u: &dyn VelocityField,
    forcing: Option<&(dyn Fn(f64, [f64; 3]) -> f64 + Sync)>,
    t: f64,
    x: [f64; 3],
    opts: &OdeOptions,
) -> Result<Exit3> {
    if t <= 0.0 {
        let region = if x[0] <= -1.0 + CORNER_TOL { Region3::Corner } else { Region3::FromInitial };
        return Ok(Exit3 { t_b: 0.0, x_b: x, region, integral: 0.0 });
    }
    if x[0] <= -1.0 {
        return Ok(Exit3 { t_b: t, x_b: x, region: Region3::FromBoundary, integral: 0.0 });
    }
    let rhs = |s: f64, y: &[f64; 4]| {
        let p = clamp_box([y[0], y[1], y[2]]);
        let v = u.velocity(s, p);
        let h = forcing.map_or(0.0, |f| f(s, p));
        [v[0], v[1], v[2], h]
    };
    let end = dopri5(rhs, t, [x[0], x[1], x[2], 0.0], 0.0, opts, |_, y| y[0] + 1.0)?;
    if end.y[0] > 1.0 + 1e-9 {
        return Err(PipeError::Internal("backward characteristic left through the outflow face".into()));
    }
    let x_b = clamp_box([if end.event { -1.0 } else { end.y[0] }, end.y[1], end.y[2]]);
    let integral = -end.y[3];
    let region = if end.event && end.t > CORNER_TOL {
        Region3::FromBoundary
    } else if end.event || x_b[0] <= -1.0 + CORNER_TOL {
        Region3::Corner
    } else {
        Region3::FromInitial
    };
    let t_b = if region == Region3::FromBoundary { end.t } else { 0.0 };
    Ok(Exit3 { t_b, x_b, region, integral })
}

/// Result of tracing characteristics forward from the lateral walls.
#[derive(Debug, Clone, PartialEq)]
pub struct LateralReport {
    pub samples: usize,
    /// Largest distance from the starting wall over all checkpoints.
    pub max_drift: f64,
    /// `(t, max drift up to t)` over the checkpoints.
    pub series: Vec<(f64, f64)>,
}

/// Points drawn uniformly on the four lateral walls.
pub fn lateral_samples(count: usize, seed: u64) -> Vec<([f64; 3], usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let wall = k % 4;
            let axis = 1 + wall / 2;
            let side = if wall % 2 == 0 { -1.0 } else { 1.0 };
            let mut x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            x[axis] = side;
            (x, axis, side)
        })
        .collect()
}

/// Forward traces of the unregularized field from wall points, measuring
/// the distance from the wall at `checkpoints` equally spaced times until
/// the horizon or exit through the outflow face.
pub fn lateral_invariance_check(
    u: &dyn VelocityField,
    samples: usize,
    horizon: f64,
    checkpoints: usize,
    seed: u64,
) -> Result<LateralReport> {
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..OdeOptions::default() };
    let m = checkpoints.max(1);
    let mut series: Vec<(f64, f64)> = (1..=m).map(|k| (horizon * k as f64 / m as f64, 0.0)).collect();
    for (x0, axis, side) in lateral_samples(samples, seed) {
        let mut y = x0;
        let mut t = 0.0;
        for slot in series.iter_mut() {
            let end = dopri5(
                |s, p: &[f64; 3]| u.velocity(s, *p),
                t,
                y,
                slot.0,
                &opts,
                |_, p| 1.0 - p[0],
            )?;
            y = end.y;
            t = end.t;
            slot.1 = slot.1.max((y[axis] - side).abs());
            if end.event {
                break;
            }
        }
    }
    let mut running = 0.0f64;
    for s in series.iter_mut() {
        running = running.max(s.1);
        s.1 = running;
    }
    Ok(LateralReport { samples, max_drift: running, series })
}
