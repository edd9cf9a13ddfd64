//! Outer and inner iterations for `dt V + A(U_bar + V) dx V = 0`.
//!
//! Outer level `l` freezes the coefficients at a mollified copy of the
//! previous iterate, `A* = A(U_bar + J_l V^l)`, and solves the resulting
//! linear system. In characteristic unknowns `f = T*^{-1} V` the linear
//! system is a family of scalar transport problems coupled only through
//! lower-order terms; the inner iteration lags that coupling and reuses the
//! scalar mild solver for each family.

use std::sync::Arc;

use nalgebra::DVector;

use super::slab::{mollify, Slab};
use crate::characteristics::{SpeedField1D, Stepping};
use crate::field::Grid1D;
use crate::systems::{decompose_matrix, eigendecompose, EigenOptions, FluxSystem};
use crate::transport::{evaluate, ScalarFn, TransportProblem1D};
use crate::{Error, Result};

pub type VectorFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Perturbation problem around the base state of `system`.
#[derive(Clone)]
pub struct SystemProblem {
    pub system: FluxSystem,
    /// Initial perturbation `V0(x)`.
    pub initial: VectorFn,
    /// Inflow data for each characteristic unknown, indexed by family.
    pub boundary: Vec<ScalarFn>,
    /// Admissible size of `||V0||_{W1,inf} + ||b||_{W1,inf}`.
    pub data_budget: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub nx: usize,
    /// Spacing of the time samples.
    pub dt: f64,
    pub horizon: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Outer stopping threshold, relative to the data norm.
    pub tol_outer: f64,
    /// Inner stopping threshold, relative to the data norm.
    pub tol_inner: f64,
    /// Bound every outer iterate must respect.
    pub delta: f64,
    /// Constant in the uniform stability bound being checked.
    pub stability_constant: f64,
    pub lambda_floor: f64,
    /// RK4 substeps per time sample when tracing.
    pub substeps: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            nx: 256,
            dt: 0.05,
            horizon: 50.0,
            max_outer: 12,
            max_inner: 20,
            tol_outer: 1e-4,
            tol_inner: 1e-10,
            delta: 0.5,
            stability_constant: 10.0,
            lambda_floor: 1e-3,
            substeps: 1,
        }
    }
}

/// Eigen-data of the frozen coefficients at every slab node.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub n: usize,
    /// `lambda_i`, `n` components.
    pub lambdas: Slab,
    /// `T`, row-major `n * n` components.
    pub t_mat: Slab,
    pub t_inv: Slab,
    /// `((dt + lambda_i dx) T^{-1})_{im}`, row-major.
    pub coupling: Slab,
    /// Lower bound on `|lambda_i|` per family.
    pub lambda_min: Vec<f64>,
    pub lambda_lip: Vec<f64>,
    pub signs: Vec<f64>,
    /// True when the coupling vanishes identically.
    pub decoupled: bool,
}

/// Decompose `A(U_bar + V*)` at every node of `vstar`.
pub fn coefficients(system: &FluxSystem, vstar: &Slab, signs: &[f64], floor: f64) -> Result<Coefficients> {
    let n = system.dim();
    let (grid, nt, dt) = (vstar.grid, vstar.nt, vstar.dt);
    let mut lambdas = Slab::zeros(grid, nt, dt, n);
    let mut t_mat = Slab::zeros(grid, nt, dt, n * n);
    let mut t_inv = Slab::zeros(grid, nt, dt, n * n);
    let opts = EigenOptions { lambda_floor: floor };
    let mut state = system.base_state.clone();
    for k in 0..nt {
        for j in 0..grid.n {
            for (c, s) in state.iter_mut().enumerate() {
                *s = system.base_state[c] + vstar.get(k, j, c);
            }
            let dec = decompose_matrix(&system.jacobian(&state)?, &opts)?;
            for i in 0..n {
                if dec.lambdas[i] * signs[i] <= 0.0 {
                    return Err(Error::Degeneracy { lambda: dec.lambdas[i].abs(), floor });
                }
                lambdas.set(k, j, i, dec.lambdas[i]);
                for m in 0..n {
                    t_mat.set(k, j, i * n + m, dec.t[(i, m)]);
                    t_inv.set(k, j, i * n + m, dec.t_inv[(i, m)]);
                }
            }
        }
    }
    let dt_inv = t_inv.time_derivative();
    let dx_inv = t_inv.space_derivative();
    let mut coupling = Slab::zeros(grid, nt, dt, n * n);
    let mut decoupled = true;
    for k in 0..nt {
        for j in 0..grid.n {
            for i in 0..n {
                let l = lambdas.get(k, j, i);
                for m in 0..n {
                    let v = dt_inv.get(k, j, i * n + m) + l * dx_inv.get(k, j, i * n + m);
                    if v != 0.0 {
                        decoupled = false;
                    }
                    coupling.set(k, j, i * n + m, v);
                }
            }
        }
    }
    let lam_dx = lambdas.space_derivative();
    let mut lambda_min = vec![f64::INFINITY; n];
    let mut lambda_lip = vec![0.0f64; n];
    for k in 0..nt {
        for j in 0..grid.n {
            for i in 0..n {
                lambda_min[i] = lambda_min[i].min(lambdas.get(k, j, i).abs());
                lambda_lip[i] = lambda_lip[i].max(lam_dx.get(k, j, i).abs());
            }
        }
    }
    Ok(Coefficients { n, lambdas, t_mat, t_inv, coupling, lambda_min, lambda_lip, signs: signs.to_vec(), decoupled })
}

/// `out = M v` at one node for a row-major `n * n` block.
#[inline]
fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for i in 0..n {
        out[i] = (0..n).map(|p| m[i * n + p] * v[p]).sum();
    }
}

/// Apply a node-wise matrix slab to a vector slab.
pub fn apply(mats: &Slab, v: &Slab) -> Slab {
    let mut out = Slab::zeros(v.grid, v.nt, v.dt, v.ncomp);
    for k in 0..v.nt {
        for j in 0..v.nx() {
            let m = mats.node(k, j).to_vec();
            mat_vec(&m, v.node(k, j), out.node_mut(k, j));
        }
    }
    out
}

/// The good unknown `g = dt f + T^{-1} (dt T) f`, which equals
/// `T^{-1} dt V` for `V = T f`.
pub fn good_unknown(f: &Slab, t_mat: &Slab, t_inv: &Slab) -> Slab {
    let n = f.ncomp;
    let dtf = f.time_derivative();
    let dtt = t_mat.time_derivative();
    let mut g = dtf.clone();
    let mut tmp = vec![0.0; n];
    let mut tmp2 = vec![0.0; n];
    for k in 0..f.nt {
        for j in 0..f.nx() {
            mat_vec(dtt.node(k, j), f.node(k, j), &mut tmp);
            mat_vec(t_inv.node(k, j), &tmp, &mut tmp2);
            for (gi, extra) in g.node_mut(k, j).iter_mut().zip(&tmp2) {
                *gi += extra;
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerDiagnostics {
    pub iterations: usize,
    /// Successive update norms.
    pub updates: Vec<f64>,
    /// Ratios of successive update norms.
    pub ratios: Vec<f64>,
    pub decoupled: bool,
}

/// Initial characteristic data `f0 = T(U_bar + V0)^{-1} V0`.
fn initial_characteristic(problem: &SystemProblem, x: f64) -> Result<Vec<f64>> {
    let v0 = (problem.initial)(x);
    let u: Vec<f64> = problem.system.base_state.iter().zip(&v0).map(|(a, b)| a + b).collect();
    let dec = eigendecompose(&problem.system, &u, &EigenOptions { lambda_floor: 0.0 })?;
    Ok(dec.to_characteristic(&v0))
}

/// Solve the frozen-coefficient system by lagging the coupling terms.
pub fn inner_solve(
    problem: &SystemProblem,
    coeffs: &Coefficients,
    config: &SystemConfig,
    scale: f64,
) -> Result<(Slab, InnerDiagnostics)> {
    let n = coeffs.n;
    let (grid, nt, dt) = (coeffs.lambdas.grid, coeffs.lambdas.nt, coeffs.lambdas.dt);
    // initial characteristic data, tabulated once per family on a fine grid
    let fine = Grid1D::new(8 * grid.n);
    let mut f0_tab = vec![Vec::with_capacity(fine.n); n];
    for j in 0..fine.n {
        let f0 = initial_characteristic(problem, fine.x(j))?;
        for i in 0..n {
            f0_tab[i].push(f0[i]);
        }
    }
    let lambdas = Arc::new(coeffs.lambdas.clone());
    let mut f = Slab::zeros(grid, nt, dt, n);
    let mut diag = InnerDiagnostics { iterations: 0, updates: vec![], ratios: vec![], decoupled: coeffs.decoupled };
    for it in 1..=config.max_inner.max(1) {
        let mut forcing = Slab::zeros(grid, nt, dt, n);
        if !coeffs.decoupled {
            let mut vf = vec![0.0; n];
            let mut out = vec![0.0; n];
            for k in 0..nt {
                for j in 0..grid.n {
                    mat_vec(coeffs.t_mat.node(k, j), f.node(k, j), &mut vf);
                    mat_vec(coeffs.coupling.node(k, j), &vf, &mut out);
                    forcing.node_mut(k, j).copy_from_slice(&out);
                }
            }
        }
        let forcing = Arc::new(forcing);
        let mut next = Slab::zeros(grid, nt, dt, n);
        for i in 0..n {
            let lam = lambdas.clone();
            let speed = SpeedField1D::new(
                move |t, x| lam.interp(i, t, x),
                coeffs.lambda_min[i],
                coeffs.lambda_lip[i],
                coeffs.signs[i],
                false,
            )
            .with_stepping(Stepping::Grid { dt, substeps: config.substeps.max(1) });
            let tab = Arc::new(f0_tab[i].clone());
            let fdx = fine.dx();
            let initial = move |x: f64| {
                let (j0, w) = super::slab::cubic_weights(tab.len(), fdx, x);
                (0..4).map(|m| w[m] * tab.get(j0 + m).copied().unwrap_or(0.0)).sum::<f64>()
            };
            let b = problem.boundary[i].clone();
            let mut tp = TransportProblem1D::new(speed, initial, move |t| b(t));
            if !coeffs.decoupled {
                let fc = forcing.clone();
                tp = tp.with_forcing(move |t, x| fc.interp(i, t, x));
            }
            for k in 0..nt {
                let t = next.time(k);
                for j in 0..grid.n {
                    let v = evaluate(&tp, t, grid.x(j))?.value;
                    next.set(k, j, i, v);
                }
            }
        }
        let upd = next.sup_diff(&f);
        if let Some(prev) = diag.updates.last() {
            diag.ratios.push(if *prev > 0.0 { upd / prev } else { 0.0 });
        }
        diag.updates.push(upd);
        diag.iterations = it;
        f = next;
        if coeffs.decoupled || upd <= config.tol_inner * scale {
            break;
        }
        let r = &diag.ratios;
        if r.len() >= 3 && r[r.len() - 3..].iter().all(|x| *x >= 1.0) {
            return Err(Error::Divergence { stage: "inner".into(), ratios: r.clone() });
        }
    }
    Ok((f, diag))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelDiagnostics {
    pub level: usize,
    /// `sup |T*^{-1} (V^{l+1} - V^l)|`.
    pub update_norm: f64,
    pub ratio: Option<f64>,
    pub inner: InnerDiagnostics,
    /// Left side of the stability bound for this iterate.
    pub stability_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SystemSolution {
    pub v: Slab,
    pub f: Slab,
    pub dt_v: Slab,
    pub dx_v: Slab,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemReport {
    pub levels: Vec<LevelDiagnostics>,
    pub converged_level: Option<usize>,
    /// `||V0||_{W1,inf} + ||b||_{W1,inf}`.
    pub data_norm: f64,
    /// `(t, |V| + |dx V| + |dt V|)` sup norms per time sample.
    pub series: Vec<(f64, f64)>,
    /// `(t, |dx V|)` per time sample.
    pub gradient_series: Vec<(f64, f64)>,
    /// `sup_t |V| + sup_t |dt V|` on the two endpoints.
    pub trace_norm: f64,
    pub stability_norm: f64,
    /// `stability_norm / data_norm`.
    pub empirical_constant: f64,
    pub stability_holds: bool,
}

impl SystemReport {
    pub fn max_outer_ratio(&self) -> f64 {
        self.levels.iter().filter_map(|l| l.ratio).fold(0.0, f64::max)
    }

    pub fn max_inner_ratio(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.inner.ratios.iter().skip(1).copied()).fold(0.0, f64::max)
    }
}

/// W1,inf norms of the data, sampled.
pub fn data_norm(problem: &SystemProblem, horizon: f64, nx: usize, dt: f64) -> f64 {
    let fine = Grid1D::new(8 * nx);
    let vals: Vec<Vec<f64>> = fine.nodes().into_iter().map(|x| (problem.initial)(x)).collect();
    let mut sup = 0.0f64;
    let mut lip = 0.0f64;
    for j in 0..fine.n {
        for c in 0..vals[j].len() {
            sup = sup.max(vals[j][c].abs());
            if j + 1 < fine.n {
                lip = lip.max((vals[j + 1][c] - vals[j][c]).abs() / fine.dx());
            }
        }
    }
    let h = dt / 8.0;
    let m = (horizon / h).ceil() as usize + 1;
    let mut bsup = 0.0f64;
    let mut blip = 0.0f64;
    for b in &problem.boundary {
        let mut prev = b(0.0);
        bsup = bsup.max(prev.abs());
        for k in 1..m {
            let cur = b(k as f64 * h);
            bsup = bsup.max(cur.abs());
            blip = blip.max((cur - prev).abs() / h);
            prev = cur;
        }
    }
    sup + lip + bsup + blip
}

fn validate(problem: &SystemProblem, config: &SystemConfig) -> Result<(Vec<f64>, f64)> {
    let n = problem.system.dim();
    if problem.boundary.len() != n {
        return Err(Error::InvalidProblem(format!("{} boundary data for {} families", problem.boundary.len(), n)));
    }
    if config.nx < 4 || config.dt <= 0.0 || config.horizon <= 0.0 {
        return Err(Error::InvalidProblem("grid needs nx >= 4 and positive dt, horizon".into()));
    }
    let base = eigendecompose(&problem.system, &problem.system.base_state, &EigenOptions::default())?;
    let signs: Vec<f64> = base.lambdas.iter().map(|l| l.signum()).collect();
    let v0_probe = (problem.initial)(0.0);
    if v0_probe.len() != n {
        return Err(Error::InvalidProblem(format!("initial datum has {} components, expected {n}", v0_probe.len())));
    }
    for i in 0..n {
        let x_in = -signs[i];
        let f0 = initial_characteristic(problem, x_in)?;
        let gap = (f0[i] - (problem.boundary[i])(0.0)).abs();
        if gap > 1e-10 {
            return Err(Error::InvalidProblem(format!("family {i}: corner mismatch {gap:.3e}")));
        }
    }
    let dn = data_norm(problem, config.horizon, config.nx, config.dt);
    if dn > problem.data_budget {
        return Err(Error::InvalidProblem(format!("data norm {dn:.4e} exceeds budget {:.4e}", problem.data_budget)));
    }
    Ok((signs, dn))
}

/// Sup-norm series and trace norm of an iterate.
fn stability_terms(v: &Slab, dt_v: &Slab, dx_v: &Slab) -> (Vec<(f64, f64)>, Vec<(f64, f64)>, f64) {
    let mut series = Vec::with_capacity(v.nt);
    let mut grad = Vec::with_capacity(v.nt);
    let mut tr_v = 0.0f64;
    let mut tr_dt = 0.0f64;
    let last = v.nx() - 1;
    for k in 0..v.nt {
        let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
        for j in 0..v.nx() {
            for comp in 0..v.ncomp {
                a = a.max(v.get(k, j, comp).abs());
                b = b.max(dx_v.get(k, j, comp).abs());
                c = c.max(dt_v.get(k, j, comp).abs());
            }
        }
        for j in [0, last] {
            for comp in 0..v.ncomp {
                tr_v = tr_v.max(v.get(k, j, comp).abs());
                tr_dt = tr_dt.max(dt_v.get(k, j, comp).abs());
            }
        }
        series.push((v.time(k), a + b + c));
        grad.push((v.time(k), b));
    }
    (series, grad, tr_v + tr_dt)
}

/// Run the nested iteration to convergence or `max_outer` levels.
pub fn outer_solve(problem: &SystemProblem, config: &SystemConfig) -> Result<(SystemSolution, SystemReport)> {
    let (signs, dn) = validate(problem, config)?;
    let n = problem.system.dim();
    let grid = Grid1D::new(config.nx);
    let nt = (config.horizon / config.dt).round() as usize + 1;
    let scale = dn.max(f64::MIN_POSITIVE);
    let mut v_prev = Slab::zeros(grid, nt, config.dt, n);
    let mut levels: Vec<LevelDiagnostics> = Vec::new();
    let mut best: Option<(SystemSolution, Vec<(f64, f64)>, Vec<(f64, f64)>, f64, f64)> = None;
    let mut converged_level = None;
    for l in 1..=config.max_outer.max(1) {
        let vstar = mollify(&v_prev, l);
        let coeffs = coefficients(&problem.system, &vstar, &signs, config.lambda_floor)?;
        let (f, inner) = inner_solve(problem, &coeffs, config, scale)?;
        let v = apply(&coeffs.t_mat, &f);
        let g = good_unknown(&f, &coeffs.t_mat, &coeffs.t_inv);
        let dt_v = apply(&coeffs.t_mat, &g);
        // dx V = -A*^{-1} dt V = -T diag(1/lambda) g
        let mut scaled = g.clone();
        for k in 0..nt {
            for j in 0..grid.n {
                for i in 0..n {
                    let val = -scaled.get(k, j, i) / coeffs.lambdas.get(k, j, i);
                    scaled.set(k, j, i, val);
                }
            }
        }
        let dx_v = apply(&coeffs.t_mat, &scaled);
        let (series, grad, trace) = stability_terms(&v, &dt_v, &dx_v);
        let stab = series.iter().fold(0.0f64, |m, s| m.max(s.1)) + trace;
        if stab > config.delta {
            return Err(Error::StabilityBudget { level: l, norm: stab, delta: config.delta });
        }
        let mut diff = v.clone();
        for (d, p) in diff.data.iter_mut().zip(&v_prev.data) {
            *d -= p;
        }
        let update = apply(&coeffs.t_inv, &diff).sup_abs();
        let ratio = levels.last().map(|p| if p.update_norm > 0.0 { update / p.update_norm } else { 0.0 });
        levels.push(LevelDiagnostics { level: l, update_norm: update, ratio, inner, stability_norm: stab });
        v_prev = v.clone();
        best = Some((SystemSolution { v, f, dt_v, dx_v }, series, grad, trace, stab));
        if update <= config.tol_outer * scale {
            converged_level = Some(l);
            break;
        }
        let rs: Vec<f64> = levels.iter().filter_map(|d| d.ratio).collect();
        if rs.len() >= 3 && rs[rs.len() - 3..].iter().all(|r| *r >= 1.0) {
            return Err(Error::Divergence { stage: "outer".into(), ratios: rs });
        }
    }
    let (solution, series, gradient_series, trace_norm, stability_norm) = best.expect("at least one level");
    let empirical_constant = stability_norm / scale;
    let report = SystemReport {
        levels,
        converged_level,
        data_norm: dn,
        series,
        gradient_series,
        trace_norm,
        stability_norm,
        empirical_constant,
        stability_holds: empirical_constant <= config.stability_constant,
    };
    Ok((solution, report))
}

/// `A(U_bar + v) w`, used to test the residual of computed derivatives.
pub fn apply_jacobian(system: &FluxSystem, v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let a = system.jacobian_at_perturbation(v)?;
    Ok((a * DVector::from_column_slice(w)).iter().copied().collect())
}
