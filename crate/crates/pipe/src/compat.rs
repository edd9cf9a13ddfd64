//! Compatibility of the profile, boundary data and initial perturbation.
//!
//! Every condition is evaluated and reported with its residual; nothing is
//! raised as an error. Conditions on closed-form data are checked to
//! `analytic_tol`, conditions that involve difference operators to
//! `discrete_factor * dx^2` times the size of the field.

use crate::boundary::PipeBoundaryData;
use crate::grid::{cross, norm3, Grid3, VectorField3, VectorKind};
use crate::profile::ShearProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatOptions {
    pub horizon: f64,
    pub time_samples: usize,
    /// Points per direction for face quadrature and face sampling.
    pub face_samples: usize,
    pub p: f64,
    pub analytic_tol: f64,
    pub discrete_factor: f64,
}

impl Default for CompatOptions {
    fn default() -> Self {
        Self { horizon: 10.0, time_samples: 21, face_samples: 65, p: 4.0, analytic_tol: 1e-10, discrete_factor: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub conditions: Vec<Condition>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

fn cond(name: &'static str, residual: f64, tolerance: f64) -> Condition {
    Condition { name, residual, tolerance, passed: residual <= tolerance }
}

fn samples(m: usize) -> Vec<f64> {
    let m = m.max(2);
    (0..m).map(|k| -1.0 + 2.0 * k as f64 / (m - 1) as f64).collect()
}

/// Trapezoid integral of `f(x2, x3)` over a unit-square face.
fn face_integral(f: impl Fn(f64, f64) -> f64, m: usize) -> f64 {
    let s = samples(m);
    let h = 2.0 / (s.len() - 1) as f64;
    let w = |k: usize| if k == 0 || k == s.len() - 1 { 0.5 * h } else { h };
    let mut total = 0.0;
    for (a, &x2) in s.iter().enumerate() {
        for (b, &x3) in s.iter().enumerate() {
            total += w(a) * w(b) * f(x2, x3);
        }
    }
    total
}

/// Richardson-extrapolated central difference.
fn diff(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let d = |e: f64| (f(x + e) - f(x - e)) / (2.0 * e);
    let e = 1e-3;
    (4.0 * d(0.5 * e) - d(e)) / 3.0
}

/// The identity that keeps `div omega = 0` on the inflow face:
/// `d2 (U w2 + v (d3 U + w2)) + d3 (U w3 + v (-d2 U + w3)) = 0`.
pub fn tangential_divergence(profile: &ShearProfile, bdata: &PipeBoundaryData, t: f64, x2: f64, x3: f64) -> f64 {
    let flux2 = |a: f64, b: f64| {
        let w = (bdata.omega_in)(t, a, b);
        let v = (bdata.v_in)(t, a, b);
        profile.speed(a, b) * w[1] + v * (profile.gradient(a, b)[1] + w[1])
    };
    let flux3 = |a: f64, b: f64| {
        let w = (bdata.omega_in)(t, a, b);
        let v = (bdata.v_in)(t, a, b);
        profile.speed(a, b) * w[2] + v * (-profile.gradient(a, b)[0] + w[2])
    };
    diff(|a| flux2(a, x3), x2) + diff(|b| flux3(x2, b), x3)
}

pub fn check_compatibility(
    profile: &ShearProfile,
    bdata: &PipeBoundaryData,
    v0: &VectorField3,
    omega0: &VectorField3,
    opts: &CompatOptions,
) -> CompatReport {
    let grid: Grid3 = v0.grid;
    let n = grid.n;
    let dx2 = grid.dx() * grid.dx();
    let tol_a = opts.analytic_tol;
    let times: Vec<f64> =
        (0..opts.time_samples.max(2)).map(|k| opts.horizon * k as f64 / (opts.time_samples.max(2) - 1) as f64).collect();
    let face = samples(opts.face_samples);
    let mut out = Vec::new();

    let u_min = profile.min_speed(&grid);
    out.push(Condition { name: "profile_positive", residual: (-u_min).max(0.0), tolerance: 0.0, passed: u_min > 0.0 });
    out.push(cond("profile_lateral_vanishing", profile.lateral_gradient_residual(opts.face_samples), tol_a));

    let v_scale = v0.sobolev_norm(VectorKind::Polar, 2, opts.p);
    let div = v0.divergence(VectorKind::Polar).lp_norm(opts.p);
    out.push(cond("div_v0", div, opts.discrete_factor * dx2 * v_scale));
    out.push(cond("v0_normal_lateral", v0.lateral_normal_sup(), tol_a));
    let mut gap = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let (x2, x3) = (grid.x(a), grid.x(b));
            gap = gap.max((v0.data[grid.idx(0, a, b)][0] - (bdata.v_in)(0.0, x2, x3)).abs());
            gap = gap.max((v0.data[grid.idx(n - 1, a, b)][0] - (bdata.v_out)(0.0, x2, x3)).abs());
        }
    }
    out.push(cond("v0_matches_normal_data", gap, tol_a));
    let curl_gap = v0.curl(VectorKind::Polar).sub(omega0).lp_norm(opts.p);
    out.push(cond("omega0_is_curl_v0", curl_gap, opts.discrete_factor * dx2 * v_scale));
    let mut gap = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let w = (bdata.omega_in)(0.0, grid.x(a), grid.x(b));
            let o = omega0.data[grid.idx(0, a, b)];
            gap = (0..3).fold(gap, |m, c| m.max((o[c] - w[c]).abs()));
        }
    }
    out.push(cond("omega0_matches_inflow_vorticity", gap, tol_a));
    out.push(cond("omega0_tangential_lateral", omega0.lateral_tangential_sup(), tol_a));

    let mut flux = 0.0f64;
    let mut normal = 0.0f64;
    let mut tdiv = 0.0f64;
    let mut edge = 0.0f64;
    for &t in &times {
        let fin = face_integral(|a, b| (bdata.v_in)(t, a, b), opts.face_samples);
        let fout = face_integral(|a, b| (bdata.v_out)(t, a, b), opts.face_samples);
        flux = flux.max((fin - fout).abs());
        for &x2 in &face {
            for &x3 in &face {
                normal = normal.max((bdata.omega_in)(t, x2, x3)[0].abs());
                if x2.abs() < 1.0 - 1e-2 && x3.abs() < 1.0 - 1e-2 {
                    tdiv = tdiv.max(tangential_divergence(profile, bdata, t, x2, x3).abs());
                }
            }
        }
        for &s in &face {
            for (x2, x3, nu) in [
                (-1.0, s, [0.0, -1.0, 0.0]),
                (1.0, s, [0.0, 1.0, 0.0]),
                (s, -1.0, [0.0, 0.0, -1.0]),
                (s, 1.0, [0.0, 0.0, 1.0]),
            ] {
                edge = edge.max(norm3(cross((bdata.omega_in)(t, x2, x3), nu)));
            }
        }
    }
    out.push(cond("flux_balance", flux, 1e-8));
    out.push(cond("inflow_vorticity_normal_zero", normal, tol_a));
    // extrapolated differences resolve the identity to about 1e-9
    out.push(cond("inflow_tangential_divergence", tdiv, 1e-8));
    out.push(cond("inflow_vorticity_edge_tangential", edge, tol_a));
    CompatReport { conditions: out }
}
