//! The coupled perturbation problem: velocity from vorticity by the div–curl
//! solver, vorticity from velocity by the lagged transport iteration, and the
//! outer loop alternating the two. Once converged, time derivatives,
//! pressure and the monitors are evaluated level by level.

use crate::boundary::PipeBoundaryData;
use crate::compat::{check_compatibility, CompatOptions, CompatReport};
use crate::divcurl::{sample_face, DivCurlOptions, DivCurlSolver};
use crate::error::{PipeError, Result};
use crate::grid::{derivative, Grid3, Parity, VectorField3, VectorKind, SCALAR_EVEN};
use crate::poisson::{EndCondition, PoissonSolver};
use crate::profile::{ShearProfile, SmallnessReport};
use crate::slab::VectorSlab;
use crate::vorticity::{stretching_forcing, vorticity_iterate, ShearSamples, VorticityOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConfig {
    pub horizon: f64,
    pub dt: f64,
    pub p: f64,
    pub n_max: usize,
    /// Relative tolerance on successive velocity and vorticity slabs.
    pub tol: f64,
    /// Bound on `sup_t ||w||_{W^{1,p}}` along the iteration.
    pub delta: f64,
    /// Smallness constant used when reporting the profile budget.
    pub profile_delta: f64,
    /// Monitors pass below `monitor_factor * dx^2` times their scale.
    pub monitor_factor: f64,
    pub vorticity: VorticityOptions,
    pub divcurl: DivCurlOptions,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 0.05,
            p: 4.0,
            n_max: 30,
            tol: 1e-6,
            delta: 1.0,
            profile_delta: 1.0,
            monitor_factor: 5.0,
            vorticity: VorticityOptions::default(),
            // the curl mismatch of a coupled iterate is the discrete
            // divergence of the vorticity, which the div monitor reports
            divcurl: DivCurlOptions { curl_tol: f64::INFINITY, ..DivCurlOptions::default() },
        }
    }
}

/// Norms and monitors at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LevelDiagnostics {
    pub t: f64,
    pub v_w2p: f64,
    pub dtv_w1p: f64,
    pub omega_w1p: f64,
    pub omega_sup: f64,
    pub dtomega_lp: f64,
    /// `||div w||_p`.
    pub div_omega: f64,
    /// `max |w x nu|` on the lateral walls.
    pub tangential: f64,
    /// `||v_t + (u_s + v) . grad v + v . grad u_s + grad p||_p`.
    pub momentum: f64,
    /// `||v_t||_p + ||(u_s + v) . grad v + v . grad u_s||_p + ||grad p||_p`.
    pub momentum_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorVerdict {
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl MonitorVerdict {
    fn new(value: f64, tolerance: f64) -> Self {
        Self { value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerReport {
    pub grid: Grid3,
    pub compat: CompatReport,
    pub smallness: SmallnessReport,
    pub outer_iterations: usize,
    pub converged: bool,
    /// `sup_t ||w^(n) - w^(n-1)||_p` per outer step.
    pub omega_distances: Vec<f64>,
    pub velocity_distances: Vec<f64>,
    pub outer_ratios: Vec<f64>,
    /// Inner distance ratios per outer step.
    pub inner_ratios: Vec<Vec<f64>>,
    pub levels: Vec<LevelDiagnostics>,
    /// `max_t ||div w||_p` against `dx^2 max_t ||w||_{W^{1,p}}`.
    pub div_omega: MonitorVerdict,
    /// `max_t |w x nu|` against `dx^2 max_t ||w||_inf`.
    pub tangential: MonitorVerdict,
    /// `max_t` residual against `dx^2 max_t` scale of the balanced terms.
    pub momentum: MonitorVerdict,
    /// Largest outer ratio once the distances leave the round-off floor.
    pub max_outer_ratio: f64,
    /// `sup_t (||v||_{W^{2,p}} + ||v_t||_{W^{1,p}})` over the data size.
    pub estimate_constant: f64,
    pub data_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerSolution {
    pub v: VectorSlab,
    pub omega: VectorSlab,
    pub report: EulerReport,
}

struct FaceSeries {
    v_in: Vec<Vec<f64>>,
    v_out: Vec<Vec<f64>>,
    dt_in: Vec<Vec<f64>>,
    dt_out: Vec<Vec<f64>>,
}

fn face_series(grid: &Grid3, bdata: &PipeBoundaryData, times: &[f64]) -> FaceSeries {
    let sample = |t: f64, f: &dyn Fn(f64, f64, f64) -> f64| sample_face(grid, |a, b| f(t, a, b));
    FaceSeries {
        v_in: times.iter().map(|&t| sample(t, &*bdata.v_in)).collect(),
        v_out: times.iter().map(|&t| sample(t, &*bdata.v_out)).collect(),
        dt_in: times.iter().map(|&t| sample(t, &|s, a, b| bdata.dt_normal(s, a, b, false))).collect(),
        dt_out: times.iter().map(|&t| sample(t, &|s, a, b| bdata.dt_normal(s, a, b, true))).collect(),
    }
}

fn velocity_slab(solver: &DivCurlSolver, omega: &VectorSlab, faces: &FaceSeries) -> Result<VectorSlab> {
    let mut v = VectorSlab::zeros(omega.grid, omega.dt, omega.levels);
    for k in 0..omega.levels {
        let sol = solver.solve(&omega.field(k), &faces.v_in[k], &faces.v_out[k])?;
        v.set_level(k, &sol.v);
    }
    Ok(v)
}

fn face_lp(grid: &Grid3, d: &[f64], p: f64) -> f64 {
    let n = grid.n;
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += grid.face_weight(a, b) * d[a * n + b].abs().powf(p);
        }
    }
    s.powf(1.0 / p)
}

pub fn euler_solve(
    profile: &ShearProfile,
    bdata: &PipeBoundaryData,
    v0: &VectorField3,
    omega0: &VectorField3,
    cfg: &EulerConfig,
) -> Result<EulerSolution> {
    let g = v0.grid;
    let p = cfg.p;
    let compat = check_compatibility(
        profile,
        bdata,
        v0,
        omega0,
        &CompatOptions { horizon: cfg.horizon, p, ..CompatOptions::default() },
    );
    if !compat.passed() {
        return Err(PipeError::Precondition(format!("incompatible data: {:?}", compat.failures())));
    }
    if !(cfg.dt > 0.0 && cfg.horizon > 0.0) {
        return Err(PipeError::Precondition("time step and horizon must be positive".into()));
    }
    let smallness = profile.smallness(&g, p, cfg.profile_delta);
    let levels = (cfg.horizon / cfg.dt).round() as usize + 1;
    let times: Vec<f64> = (0..levels).map(|k| k as f64 * cfg.dt).collect();
    let faces = face_series(&g, bdata, &times);
    let solver = DivCurlSolver::new(g, DivCurlOptions { p, ..cfg.divcurl });
    let vopts = VorticityOptions { p, ..cfg.vorticity };

    let mut omega = VectorSlab::zeros(g, cfg.dt, levels);
    let mut v = velocity_slab(&solver, &omega, &faces)?;
    let mut omega_distances = Vec::new();
    let mut velocity_distances = Vec::new();
    let mut outer_ratios = Vec::new();
    let mut inner_ratios = Vec::new();
    let mut converged = false;
    let mut outer = 1;
    let mut run = 0;
    while outer < cfg.n_max.max(2) {
        outer += 1;
        let inner = vorticity_iterate(profile, &v, omega0, bdata, Some(&omega), &vopts)?;
        inner_ratios.push(inner.ratios.clone());
        let next_v = velocity_slab(&solver, &inner.omega, &faces)?;
        let dw = inner.omega.sup_lp_distance(&omega, p);
        let dv = next_v.sup_lp_distance(&v, p);
        let (sw, sv) = (inner.omega.sup_lp(p), next_v.sup_lp(p));
        if let Some(&last) = omega_distances.last() {
            let r: f64 = if last > 0.0 { dw / last } else { 0.0 };
            outer_ratios.push(r);
            run = if r >= 1.0 { run + 1 } else { 0 };
        }
        omega_distances.push(dw);
        velocity_distances.push(dv);
        omega = inner.omega;
        v = next_v;
        let mut size = 0.0f64;
        for k in 0..levels {
            size = size.max(omega.field(k).sobolev_norm(VectorKind::Axial, 1, p));
        }
        if size > cfg.delta {
            return Err(PipeError::StabilityBudget { iteration: outer, norm: size, delta: cfg.delta });
        }
        if (dw <= cfg.tol * sw || dw == 0.0) && (dv <= cfg.tol * sv || dv == 0.0) {
            converged = true;
            break;
        }
        if run >= 3 {
            return Err(PipeError::Divergence { stage: "outer".into(), ratios: outer_ratios });
        }
    }

    let shear = ShearSamples::new(profile, &g);
    let poisson = PoissonSolver::new(g);
    let mut diag = Vec::with_capacity(levels);
    for k in 0..levels {
        diag.push(diagnose_level(&g, &shear, &solver, &poisson, &v, &omega, &faces, k, p)?);
    }
    let dx2 = g.dx() * g.dx();
    let fct = cfg.monitor_factor;
    let maxf = |f: fn(&LevelDiagnostics) -> f64| diag.iter().map(f).fold(0.0f64, f64::max);
    let div_omega = MonitorVerdict::new(maxf(|d| d.div_omega), fct * dx2 * maxf(|d| d.omega_w1p));
    let tangential = MonitorVerdict::new(maxf(|d| d.tangential), fct * dx2 * maxf(|d| d.omega_sup));
    let m_scale = maxf(|d| d.momentum_scale);
    let momentum = MonitorVerdict::new(maxf(|d| d.momentum), fct * dx2 * m_scale);

    // ratios of distances already at round-off say nothing about contraction
    let floor = 1e-12 * omega.sup_lp(p).max(f64::MIN_POSITIVE);
    let max_outer_ratio = outer_ratios
        .iter()
        .enumerate()
        .filter(|(i, _)| omega_distances[*i] > floor)
        .map(|(_, r)| *r)
        .fold(0.0f64, f64::max);

    let mut data_norm = v0.sobolev_norm(VectorKind::Polar, 2, p);
    let mut face_sup = 0.0f64;
    for k in 0..levels {
        let w = sample_face(&g, |a, b| {
            let o = (bdata.omega_in)(times[k], a, b);
            (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt()
        });
        face_sup = face_sup.max(
            face_lp(&g, &faces.v_in[k], p)
                + face_lp(&g, &faces.v_out[k], p)
                + face_lp(&g, &faces.dt_in[k], p)
                + face_lp(&g, &faces.dt_out[k], p)
                + face_lp(&g, &w, p),
        );
    }
    data_norm += face_sup;
    let response = diag.iter().map(|d| d.v_w2p + d.dtv_w1p).fold(0.0f64, f64::max);
    let estimate_constant = if data_norm > 0.0 { response / data_norm } else { 0.0 };

    Ok(EulerSolution {
        report: EulerReport {
            grid: g,
            compat,
            smallness,
            outer_iterations: outer,
            converged,
            omega_distances,
            velocity_distances,
            outer_ratios,
            inner_ratios,
            levels: diag,
            div_omega,
            tangential,
            momentum,
            max_outer_ratio,
            estimate_constant,
            data_norm,
        },
        v,
        omega,
    })
}

/// `(u_s + v) . grad v + v . grad u_s` per node.
pub fn convection(shear: &ShearSamples, v: &[[f64; 3]], jac_v: &[[[f64; 3]; 3]]) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; v.len()];
    for (idx, f) in out.iter_mut().enumerate() {
        let u = [shear.speed[idx] + v[idx][0], v[idx][1], v[idx][2]];
        let j = &jac_v[idx];
        for i in 0..3 {
            f[i] = j[i][0] * u[0] + j[i][1] * u[1] + j[i][2] * u[2];
        }
        let gu = shear.gradient[idx];
        f[0] += gu[0] * v[idx][1] + gu[1] * v[idx][2];
    }
    out
}

/// Pressure from `-Δp = div F` with `d_nu p = -nu . (v_t + F)` on the
/// boundary. Returns the pressure, `||v_t + F + grad p||_p` and
/// `||grad p||_p`.
pub fn momentum_residual(
    poisson: &PoissonSolver,
    dtv: &VectorField3,
    convective: &VectorField3,
    p: f64,
) -> (Vec<f64>, f64, f64) {
    let g = dtv.grid;
    let n = g.n;
    let div = convective.divergence(VectorKind::Polar);
    let face = |i1: usize| -> Vec<f64> {
        (0..n * n).map(|k| -(dtv.data[i1 * n * n + k][0] + convective.data[i1 * n * n + k][0])).collect()
    };
    let (gin, gout) = (face(0), face(n - 1));
    let pressure = poisson
        .solve(&div.data, [Parity::Even, Parity::Even], EndCondition::Slope(&gin), EndCondition::Slope(&gout))
        .field;
    let mut grad: Vec<Vec<f64>> = (0..3).map(|a| derivative(&g, &pressure, a, SCALAR_EVEN)).collect();
    // the normal pressure gradient on the end faces is the Neumann datum
    for k in 0..n * n {
        grad[0][k] = gin[k];
        grad[0][(n - 1) * n * n + k] = gout[k];
    }
    let grad_norm = VectorField3::from_components(g, [&grad[0], &grad[1], &grad[2]]).lp_norm(p);
    let residual = VectorField3 {
        grid: g,
        data: (0..g.len())
            .map(|i| {
                let (a, b) = (dtv.data[i], convective.data[i]);
                [a[0] + b[0] + grad[0][i], a[1] + b[1] + grad[1][i], a[2] + b[2] + grad[2][i]]
            })
            .collect(),
    };
    (pressure, residual.lp_norm(p), grad_norm)
}

#[allow(clippy::too_many_arguments)]
fn diagnose_level(
    g: &Grid3,
    shear: &ShearSamples,
    solver: &DivCurlSolver,
    poisson: &PoissonSolver,
    v: &VectorSlab,
    omega: &VectorSlab,
    faces: &FaceSeries,
    k: usize,
    p: f64,
) -> Result<LevelDiagnostics> {
    let vk = v.field(k);
    let wk = omega.field(k);
    let jv = vk.jacobian(VectorKind::Polar);
    let jw = wk.jacobian(VectorKind::Axial);
    let h = stretching_forcing(*g, shear, &vk.data, &jv, &wk.data);
    let dtw = VectorField3 {
        grid: *g,
        data: (0..g.len())
            .map(|i| {
                let u = [shear.speed[i] + vk.data[i][0], vk.data[i][1], vk.data[i][2]];
                let j = &jw[i];
                let mut out = [0.0; 3];
                for c in 0..3 {
                    out[c] = h[i][c] - (j[c][0] * u[0] + j[c][1] * u[1] + j[c][2] * u[2]);
                }
                out
            })
            .collect(),
    };
    let dtv = solver.solve(&dtw, &faces.dt_in[k], &faces.dt_out[k])?.v;
    let conv = VectorField3 { grid: *g, data: convection(shear, &vk.data, &jv) };
    let (_, momentum, grad_p) = momentum_residual(poisson, &dtv, &conv, p);
    Ok(LevelDiagnostics {
        t: v.time(k),
        v_w2p: vk.sobolev_norm(VectorKind::Polar, 2, p),
        dtv_w1p: dtv.sobolev_norm(VectorKind::Polar, 1, p),
        omega_w1p: wk.sobolev_norm(VectorKind::Axial, 1, p),
        omega_sup: wk.sup_norm(),
        dtomega_lp: dtw.lp_norm(p),
        div_omega: wk.divergence(VectorKind::Axial).lp_norm(p),
        tangential: wk.lateral_tangential_sup(),
        momentum,
        momentum_scale: dtv.lp_norm(p) + conv.lp_norm(p) + grad_p,
    })
}
