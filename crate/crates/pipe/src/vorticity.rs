//! Vorticity of the perturbation for a given velocity slab.
//!
//! With `u = u_s + v` frozen, the perturbation vorticity solves
//! `w_t + u . grad w = -v . grad w_s + w_s . grad v + w . grad u`
//! with `w = w_b` on the inflow face. The last term is lagged: each sweep
//! uses the previous iterate in the stretching term, so every sweep is a
//! linear transport problem with known forcing. A sweep marches level by
//! level along backward characteristics of `u + eps (0, x2, x3)`, with
//! tricubic interpolation at the feet and the trapezoid rule for the
//! forcing.

use inflow_core::ode::rk4_grid;

use crate::boundary::PipeBoundaryData;
use crate::error::{PipeError, Result};
use crate::grid::{cross, Grid3, VectorField3, VectorKind};
use crate::profile::ShearProfile;
use crate::slab::{trilinear, Tricubic, VectorSlab};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorticityOptions {
    pub l_max: usize,
    /// Stop once `sup_t ||w^{l+1} - w^l||_p <= tol sup_t ||w^{l+1}||_p`.
    pub tol: f64,
    pub p: f64,
    /// RK4 substeps per time level along each characteristic.
    pub substeps: usize,
    pub eps: f64,
}

impl Default for VorticityOptions {
    fn default() -> Self {
        Self { l_max: 30, tol: 1e-8, p: 4.0, substeps: 2, eps: crate::transport::DEFAULT_EPS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VorticityResult {
    pub omega: VectorSlab,
    /// `sup_t ||w^{l+1} - w^l||_p` per sweep.
    pub distances: Vec<f64>,
    /// Successive distance ratios.
    pub ratios: Vec<f64>,
    pub converged: bool,
    /// `sup_t ||w||_p / (||w_0||_p + sup_t ||w_b||_p + sup_t ||v||_{W^{1,p}})`.
    pub estimate_constant: f64,
}

/// The shear flow sampled on the grid.
#[derive(Debug, Clone)]
pub struct ShearSamples {
    pub speed: Vec<f64>,
    /// `(d2 U, d3 U)`.
    pub gradient: Vec<[f64; 2]>,
    pub vorticity: Vec<[f64; 3]>,
    pub vorticity_jacobian: Vec<[[f64; 3]; 3]>,
}

impl ShearSamples {
    pub fn new(profile: &ShearProfile, grid: &Grid3) -> Self {
        let pts: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.point(i)).collect();
        Self {
            speed: pts.iter().map(|x| profile.speed(x[1], x[2])).collect(),
            gradient: pts.iter().map(|x| profile.gradient(x[1], x[2])).collect(),
            vorticity: pts.iter().map(|&x| profile.vorticity(x)).collect(),
            vorticity_jacobian: pts.iter().map(|&x| profile.vorticity_jacobian(x)).collect(),
        }
    }
}

/// `-v . grad w_s + w_s . grad v + w . grad (u_s + v)` per node. The part
/// linear in `v` is taken as the discrete `curl (v x w_s)`, which it equals
/// for divergence-free fields; the discrete divergence of a discrete curl
/// vanishes, so this part adds nothing to `div w`.
pub fn stretching_forcing(
    grid: Grid3,
    shear: &ShearSamples,
    v: &[[f64; 3]],
    jac_v: &[[[f64; 3]; 3]],
    omega: &[[f64; 3]],
) -> Vec<[f64; 3]> {
    let carried = VectorField3 { grid, data: v.iter().zip(&shear.vorticity).map(|(a, b)| cross(*a, *b)).collect() };
    let mut out = carried.curl(VectorKind::Polar).data;
    for (idx, h) in out.iter_mut().enumerate() {
        let jv = &jac_v[idx];
        let w = omega[idx];
        let g = shear.gradient[idx];
        for i in 0..3 {
            h[i] += jv[i][0] * w[0] + jv[i][1] * w[1] + jv[i][2] * w[2];
        }
        h[0] += g[0] * w[1] + g[1] * w[2];
    }
    out
}

fn level_jacobian(grid: Grid3, v: &[[f64; 3]]) -> Vec<[[f64; 3]; 3]> {
    VectorField3 { grid, data: v.to_vec() }.jacobian(VectorKind::Polar)
}

fn lerp3(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]
}

/// One sweep: march `w_t + u . grad w = h` with `h` built from `lagged`.
fn sweep(
    profile: &ShearProfile,
    shear: &ShearSamples,
    v: &VectorSlab,
    omega0: &VectorField3,
    bdata: &PipeBoundaryData,
    lagged: &VectorSlab,
    opts: &VorticityOptions,
) -> VectorSlab {
    let g = v.grid;
    let dt = v.dt;
    let cubic = Tricubic::new(g, VectorKind::Axial);
    let mut out = VectorSlab::zeros(g, dt, v.levels);
    out.set_level(0, omega0);
    let forcing = |k: usize| stretching_forcing(g, shear, v.level(k), &level_jacobian(g, v.level(k)), lagged.level(k));
    let mut h_prev = forcing(0);
    for k in 0..v.levels - 1 {
        let h_next = forcing(k + 1);
        let (t0, t1) = (v.time(k), v.time(k + 1));
        let (va, vb) = (v.level(k), v.level(k + 1));
        let velocity = |t: f64, y: &[f64; 3]| {
            let s = ((t - t0) / dt).clamp(0.0, 1.0);
            let p = lerp3(trilinear(&g, va, *y), trilinear(&g, vb, *y), s);
            let (y2, y3) = (y[1].clamp(-1.0, 1.0), y[2].clamp(-1.0, 1.0));
            [profile.speed(y2, y3) + p[0], p[1] + opts.eps * y[1], p[2] + opts.eps * y[2]]
        };
        let mut next = vec![[0.0; 3]; g.len()];
        {
            let prev = out.level(k);
            for (idx, slot) in next.iter_mut().enumerate() {
                let x = g.point(idx);
                let end = rk4_grid(velocity, t1, x, t0, dt, opts.substeps, 1e-12, |_, y| y[0] + 1.0);
                let hn = h_next[idx];
                *slot = if end.event {
                    let y = [-1.0, end.y[1].clamp(-1.0, 1.0), end.y[2].clamp(-1.0, 1.0)];
                    let s = ((end.t - t0) / dt).clamp(0.0, 1.0);
                    let hf = lerp3(cubic.eval(&h_prev, y), cubic.eval(&h_next, y), s);
                    let wb = (bdata.omega_in)(end.t, y[1], y[2]);
                    let span = 0.5 * (t1 - end.t);
                    [wb[0] + span * (hf[0] + hn[0]), wb[1] + span * (hf[1] + hn[1]), wb[2] + span * (hf[2] + hn[2])]
                } else {
                    let w = cubic.eval(prev, end.y);
                    let hf = cubic.eval(&h_prev, end.y);
                    let span = 0.5 * dt;
                    [w[0] + span * (hf[0] + hn[0]), w[1] + span * (hf[1] + hn[1]), w[2] + span * (hf[2] + hn[2])]
                };
            }
        }
        out.level_mut(k + 1).copy_from_slice(&next);
        h_prev = h_next;
    }
    out
}

fn face_sup_lp(grid: &Grid3, slab_times: &[f64], f: impl Fn(f64, f64, f64) -> [f64; 3], p: f64) -> f64 {
    let n = grid.n;
    let mut best = 0.0f64;
    for &t in slab_times {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                let w = f(t, grid.x(a), grid.x(b));
                s += grid.face_weight(a, b) * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt().powf(p);
            }
        }
        best = best.max(s.powf(1.0 / p));
    }
    best
}

/// Lagged iteration for the vorticity. `warm` seeds the stretching term;
/// without it the first sweep uses zero.
pub fn vorticity_iterate(
    profile: &ShearProfile,
    v: &VectorSlab,
    omega0: &VectorField3,
    bdata: &PipeBoundaryData,
    warm: Option<&VectorSlab>,
    opts: &VorticityOptions,
) -> Result<VorticityResult> {
    let g = v.grid;
    if v.levels < 2 {
        return Err(PipeError::Precondition("velocity slab needs at least two levels".into()));
    }
    let shear = ShearSamples::new(profile, &g);
    let mut lagged = match warm {
        Some(w) => w.clone(),
        None => VectorSlab::zeros(g, v.dt, v.levels),
    };
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut run = 0;
    for _ in 0..opts.l_max.max(1) {
        let next = sweep(profile, &shear, v, omega0, bdata, &lagged, opts);
        let d = next.sup_lp_distance(&lagged, opts.p);
        let scale = next.sup_lp(opts.p);
        if let Some(&last) = distances.last() {
            let r: f64 = if last > 0.0 { d / last } else { 0.0 };
            ratios.push(r);
            run = if r >= 1.0 { run + 1 } else { 0 };
        }
        distances.push(d);
        lagged = next;
        if d <= opts.tol * scale || d == 0.0 {
            converged = true;
            break;
        }
        if run >= 3 {
            return Err(PipeError::Divergence { stage: "vorticity".into(), ratios });
        }
    }
    let p = opts.p;
    let mut v_w1 = 0.0f64;
    for k in 0..v.levels {
        v_w1 = v_w1.max(v.field(k).sobolev_norm(VectorKind::Polar, 1, p));
    }
    let data = omega0.lp_norm(p) + face_sup_lp(&g, &v.times(), |t, a, b| (bdata.omega_in)(t, a, b), p) + v_w1;
    let size = lagged.sup_lp(p);
    let estimate_constant = if data > 0.0 { size / data } else { 0.0 };
    Ok(VorticityResult { omega: lagged, distances, ratios, converged, estimate_constant })
}
