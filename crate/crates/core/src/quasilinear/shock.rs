//! Contrast between inflow and periodic Burgers dynamics.
//!
//! With periodic boundary conditions `u0 = 1 + a sin(m pi x)` steepens into
//! a shock at `t* = 1 / (a m pi)`. On the inflow interval every parcel
//! leaves after a transit time of about `2 / (1 - a)`, which is too short
//! for the same steepening, so the gradient stays bounded for all time.

use std::f64::consts::PI;
use std::sync::Arc;

use super::solver::{outer_solve, SystemConfig, SystemProblem};
use crate::systems::FluxSystem;
use crate::Result;

/// First time two characteristics of periodic Burgers with
/// `u0 = 1 + a sin(m pi x)` cross, located by bisection on a crossing test
/// over `samples` characteristics per period.
pub fn periodic_shock_time(amplitude: f64, mode: u32, samples: usize) -> f64 {
    let k = mode as f64 * PI;
    let x0: Vec<f64> = (0..samples).map(|j| -1.0 + 2.0 * j as f64 / samples as f64).collect();
    let u0: Vec<f64> = x0.iter().map(|x| 1.0 + amplitude * (k * x).sin()).collect();
    let crossed = |t: f64| {
        (0..samples).any(|j| {
            let jn = (j + 1) % samples;
            let gap = if jn == 0 { x0[jn] + 2.0 - x0[j] } else { x0[jn] - x0[j] };
            gap + t * (u0[jn] - u0[j]) <= 0.0
        })
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !crossed(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if crossed(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}

/// `(t, max |u_x|)` for periodic Burgers before the shock, from
/// `u_x = u0' / (1 + t u0')` along characteristics.
pub fn periodic_gradient_series(amplitude: f64, mode: u32, times: &[f64]) -> Vec<(f64, f64)> {
    let k = mode as f64 * PI;
    let m = 4096;
    times
        .iter()
        .map(|&t| {
            let mut g = 0.0f64;
            for j in 0..m {
                let d = amplitude * k * (k * (-1.0 + 2.0 * j as f64 / m as f64)).cos();
                let den = 1.0 + t * d;
                g = if den <= 0.0 { f64::INFINITY } else { g.max((d / den).abs()) };
            }
            (t, g)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockContrastReport {
    pub amplitude: f64,
    pub mode: u32,
    pub periodic_shock_time: f64,
    /// `1 / (a m pi)`.
    pub predicted_shock_time: f64,
    pub initial_gradient: f64,
    pub max_gradient: f64,
    pub growth: f64,
    /// `(t, max |dx V|)` for the inflow run.
    pub gradient_series: Vec<(f64, f64)>,
    pub periodic_gradient_series: Vec<(f64, f64)>,
    pub converged_level: Option<usize>,
}

/// Burgers around `U_bar = 1` with `V0 = a sin(m pi x)` and the matching
/// inflow datum `b(t) = a sin(m pi (-1 - t))`, compared with the periodic
/// problem for the same initial wave.
pub fn shock_contrast(amplitude: f64, mode: u32, config: &SystemConfig) -> Result<ShockContrastReport> {
    let k = mode as f64 * PI;
    let problem = SystemProblem {
        system: FluxSystem::burgers(),
        initial: Arc::new(move |x| vec![amplitude * (k * x).sin()]),
        boundary: vec![Arc::new(move |t| amplitude * (k * (-1.0 - t)).sin())],
        data_budget: f64::INFINITY,
    };
    let (_, report) = outer_solve(&problem, config)?;
    let initial_gradient = amplitude * k;
    let max_gradient = report.gradient_series.iter().fold(0.0f64, |m, g| m.max(g.1));
    let t_star = periodic_shock_time(amplitude, mode, 1 << 14);
    let times: Vec<f64> = report.gradient_series.iter().map(|g| g.0).filter(|t| *t < t_star).collect();
    Ok(ShockContrastReport {
        amplitude,
        mode,
        periodic_shock_time: t_star,
        predicted_shock_time: 1.0 / (amplitude * k),
        initial_gradient,
        max_gradient,
        growth: max_gradient / initial_gradient,
        gradient_series: report.gradient_series,
        periodic_gradient_series: periodic_gradient_series(amplitude, mode, &times),
        converged_level: report.converged_level,
    })
}
