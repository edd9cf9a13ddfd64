//! Scalar transport in the pipe, `f_t + u . grad f = h`, with data on the
//! inflow face, evaluated node by node along backward characteristics of the
//! regularized field.

use std::sync::Arc;

use inflow_core::ode::OdeOptions;

use crate::error::{PipeError, Result};
use crate::grid::{Grid3, ScalarField3};
use crate::trace::{backward_exit, Regularized, Region3, VelocityField};

pub type PointFn = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;
pub type FaceDatum = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, [f64; 3]) -> f64 + Send + Sync>;

/// Default size of the outward wall regularization.
pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Clone)]
pub struct Transport3D {
    pub velocity: Arc<dyn VelocityField>,
    pub initial: PointFn,
    /// Inflow datum `b(t, x2, x3)` on `x1 = -1`.
    pub boundary: FaceDatum,
    pub forcing: Option<SpaceTimeFn>,
    pub eps: f64,
    pub ode: OdeOptions,
}

impl std::fmt::Debug for Transport3D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transport3D").field("eps", &self.eps).finish_non_exhaustive()
    }
}

impl Transport3D {
    pub fn new(velocity: impl Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self {
            velocity: Arc::new(velocity),
            initial: Arc::new(|_| 0.0),
            boundary: Arc::new(|_, _, _| 0.0),
            forcing: None,
            eps: DEFAULT_EPS,
            ode: OdeOptions { rtol: 1e-10, atol: 1e-12, ..OdeOptions::default() },
        }
    }

    pub fn with_initial(mut self, f0: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(f0);
        self
    }

    pub fn with_boundary(mut self, b: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary = Arc::new(b);
        self
    }

    pub fn with_forcing(mut self, h: impl Fn(f64, [f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        self.forcing = Some(Arc::new(h));
        self
    }
}

/// Both sides of the smallness condition for derivative estimates:
/// `||d u||^p (1 + c1^-p + c1^-p ||(u2, u3)||^p) <= delta (c1 alpha)^p`
/// with `d = (d_t, d_2, d_3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessBudget3D {
    pub p: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl SmallnessBudget3D {
    /// Sample `u` on the grid at `time_samples` times in `[0, horizon]`,
    /// differentiating by central differences.
    pub fn evaluate(
        u: &dyn VelocityField,
        grid: &Grid3,
        horizon: f64,
        time_samples: usize,
        p: f64,
        delta: f64,
    ) -> Self {
        let alpha = 1.0;
        let e = 1e-5;
        let m = time_samples.max(2);
        let (mut c1, mut c2) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut dmax, mut lat) = (0.0f64, 0.0f64);
        for k in 0..m {
            let t = horizon * k as f64 / (m - 1) as f64;
            for idx in 0..grid.len() {
                let x = grid.point(idx);
                let v = u.velocity(t, x);
                c1 = c1.min(v[0]);
                c2 = c2.max(v[0]);
                lat = lat.max(v[1].hypot(v[2]));
                let (lo, hi) = ((t - e).max(0.0), t + e);
                let (a, b) = (u.velocity(hi, x), u.velocity(lo, x));
                for c in 0..3 {
                    dmax = dmax.max(((a[c] - b[c]) / (hi - lo)).abs());
                }
                for axis in 1..3 {
                    let (mut xp, mut xm) = (x, x);
                    xp[axis] = (x[axis] + e).min(1.0);
                    xm[axis] = (x[axis] - e).max(-1.0);
                    let (a, b) = (u.velocity(t, xp), u.velocity(t, xm));
                    for c in 0..3 {
                        dmax = dmax.max(((a[c] - b[c]) / (xp[axis] - xm[axis])).abs());
                    }
                }
            }
        }
        let lhs = dmax.powf(p) * (1.0 + c1.powf(-p) + c1.powf(-p) * lat.powf(p));
        let rhs = delta * (c1 * alpha).powf(p);
        Self { p, alpha, c1, c2, delta, lhs, rhs }
    }

    pub fn holds(&self) -> bool {
        self.c1 > 0.0 && self.lhs <= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transport3DSolution {
    pub t: f64,
    pub field: ScalarField3,
    /// Node counts classified as initial, boundary and corner.
    pub regions: [usize; 3],
}

fn check_speed(u: &dyn VelocityField, grid: &Grid3, t: f64, c1: f64) -> Result<()> {
    let m = ((4.0 * t).ceil() as usize).max(1);
    for k in 0..=m {
        let s = t * k as f64 / m as f64;
        for idx in 0..grid.len() {
            let u1 = u.velocity(s, grid.point(idx))[0];
            if u1 < c1 * (1.0 - 1e-12) {
                return Err(PipeError::Precondition(format!("u1 = {u1:.6e} below c1 = {c1:.6e} at t = {s}")));
            }
        }
    }
    Ok(())
}

/// Mild solution at time `t` on every node of `grid`.
pub fn transport3d_solve(
    problem: &Transport3D,
    grid: &Grid3,
    budget: &SmallnessBudget3D,
    t: f64,
) -> Result<Transport3DSolution> {
    if budget.c1 <= 0.0 {
        return Err(PipeError::Precondition("lower speed bound must be positive".into()));
    }
    if !budget.holds() {
        return Err(PipeError::Precondition(format!(
            "smallness budget fails: {:.3e} > {:.3e}",
            budget.lhs, budget.rhs
        )));
    }
    check_speed(problem.velocity.as_ref(), grid, t, budget.c1)?;
    let reg = Regularized { inner: problem.velocity.clone(), eps: problem.eps };
    let forcing = problem.forcing.as_deref().map(|h| h as &(dyn Fn(f64, [f64; 3]) -> f64 + Sync));
    let mut field = ScalarField3::zeros(*grid);
    let mut regions = [0usize; 3];
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        let exit = backward_exit(&reg, forcing, t, x, &problem.ode)?;
        let (base, slot) = match exit.region {
            Region3::FromInitial => ((problem.initial)(exit.x_b), 0),
            Region3::FromBoundary => ((problem.boundary)(exit.t_b, exit.x_b[1], exit.x_b[2]), 1),
            Region3::Corner => ((problem.initial)(exit.x_b), 2),
        };
        regions[slot] += 1;
        field.data[idx] = base + exit.integral;
    }
    Ok(Transport3DSolution { t, field, regions })
}

/// Solutions at several times, kept for a posteriori estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport3DRun {
    pub grid: Grid3,
    pub budget: SmallnessBudget3D,
    pub solutions: Vec<Transport3DSolution>,
}

pub fn transport3d_run(
    problem: &Transport3D,
    grid: &Grid3,
    budget: &SmallnessBudget3D,
    times: &[f64],
) -> Result<Transport3DRun> {
    let solutions = times.iter().map(|&t| transport3d_solve(problem, grid, budget, t)).collect::<Result<_>>()?;
    Ok(Transport3DRun { grid: *grid, budget: *budget, solutions })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLpReport {
    /// `(t, ||w f(t)||_p^p)`.
    pub series: Vec<(f64, f64)>,
    pub lhs: f64,
    pub initial_term: f64,
    pub boundary_term: f64,
    pub forcing_term: f64,
    pub rhs: f64,
    pub constant: f64,
    pub holds: bool,
}

fn weighted_power(grid: &Grid3, alpha: f64, p: f64, f: impl Fn(usize, [f64; 3]) -> f64) -> f64 {
    let mut s = 0.0;
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        let w = (-alpha * x[0]).exp();
        s += grid.weight(idx) * (w * f(idx, x)).abs().powf(p);
    }
    s
}

/// `sup_t ||w f(t)||_p^p <= C (||w f0||^p + c2/(alpha c1) ||w b||^p +
/// (c1 alpha)^-p ||w h||^p)` with `w = exp(-alpha x1)`, the suprema in time
/// taken over the run times.
pub fn weighted_lp_decay_check(
    run: &Transport3DRun,
    problem: &Transport3D,
    p: f64,
    alpha: f64,
    constant: f64,
) -> WeightedLpReport {
    let g = &run.grid;
    let series: Vec<(f64, f64)> =
        run.solutions.iter().map(|s| (s.t, weighted_power(g, alpha, p, |k, _| s.field.data[k]))).collect();
    let lhs = series.iter().fold(0.0f64, |m, s| m.max(s.1));
    let initial_term = weighted_power(g, alpha, p, |_, x| (problem.initial)(x));
    let n = g.n;
    let wb = alpha.exp();
    let mut bsup = 0.0f64;
    let mut hsup = 0.0f64;
    for s in &run.solutions {
        let mut face = 0.0;
        for a in 0..n {
            for b in 0..n {
                face += g.face_weight(a, b) * (wb * (problem.boundary)(s.t, g.x(a), g.x(b))).abs().powf(p);
            }
        }
        bsup = bsup.max(face);
        if let Some(h) = &problem.forcing {
            hsup = hsup.max(weighted_power(g, alpha, p, |_, x| h(s.t, x)));
        }
    }
    let c1 = run.budget.c1;
    let boundary_term = run.budget.c2 / (alpha * c1) * bsup;
    let forcing_term = (c1 * alpha).powf(-p) * hsup;
    let rhs = initial_term + boundary_term + forcing_term;
    WeightedLpReport {
        series,
        lhs,
        initial_term,
        boundary_term,
        forcing_term,
        rhs,
        constant,
        holds: lhs <= constant * rhs,
    }
}
