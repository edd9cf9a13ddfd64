//! Forced scalar transport `dt f + lambda dx f = h` on `[-1, 1]` with data on
//! the inflow endpoint.
//!
//! The solution is evaluated pointwise from its mild form: follow the
//! backward characteristic to its foot point, take the initial or boundary
//! value there and add the integral of `h` along the way. Nothing is
//! marched on a grid, so there is no CFL restriction.

use std::sync::Arc;

use crate::characteristics::{backward_exit_with_forcing, corner_exit_time, ExitRecord, Region, SpaceTimeFn, SpeedField1D};
use crate::field::{Grid1D, ScalarField1D, WeightParams};
use crate::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance used to decide that a point lies on the corner characteristic.
pub const CORNER_TOL: f64 = 1e-9;

/// Jumps across the corner characteristic smaller than this are treated as
/// continuous.
pub const JUMP_TOL: f64 = 1e-8;

const FD_STEP: f64 = 1e-5;

#[derive(Clone)]
pub struct TransportProblem1D {
    pub speed: SpeedField1D,
    /// Initial datum `f0(x)`.
    pub initial: ScalarFn,
    /// Inflow datum `b(t)`.
    pub boundary: ScalarFn,
    pub forcing: Option<SpaceTimeFn>,
    pub initial_dx: Option<ScalarFn>,
    pub boundary_dt: Option<ScalarFn>,
    pub forcing_dt: Option<SpaceTimeFn>,
}

impl TransportProblem1D {
    pub fn new(
        speed: SpeedField1D,
        initial: impl Fn(f64) -> f64 + Send + Sync + 'static,
        boundary: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            speed,
            initial: Arc::new(initial),
            boundary: Arc::new(boundary),
            forcing: None,
            initial_dx: None,
            boundary_dt: None,
            forcing_dt: None,
        }
    }

    pub fn with_forcing(mut self, h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.forcing = Some(Arc::new(h));
        self
    }

    /// Supply exact derivatives of the data; otherwise centered differences
    /// are used by [`solve_time_derivative`].
    pub fn with_derivatives(
        mut self,
        initial_dx: impl Fn(f64) -> f64 + Send + Sync + 'static,
        boundary_dt: impl Fn(f64) -> f64 + Send + Sync + 'static,
        forcing_dt: Option<SpaceTimeFn>,
    ) -> Self {
        self.initial_dx = Some(Arc::new(initial_dx));
        self.boundary_dt = Some(Arc::new(boundary_dt));
        self.forcing_dt = forcing_dt;
        self
    }

    pub fn forcing_at(&self, t: f64, x: f64) -> f64 {
        self.forcing.as_ref().map_or(0.0, |h| h(t, x))
    }

    /// `|f0(inflow) - b(0)|`; zero for compatible data.
    pub fn corner_mismatch(&self) -> f64 {
        ((self.initial)(self.speed.inflow_point()) - (self.boundary)(0.0)).abs()
    }
}

/// Value of the mild solution at one point together with its foot point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: f64,
    pub exit: ExitRecord,
    /// Difference between the two branches on the corner characteristic.
    pub corner_jump: Option<f64>,
}

pub fn evaluate(problem: &TransportProblem1D, t: f64, x: f64) -> Result<PointValue> {
    let forcing = problem.forcing.as_deref().map(|h| h as &(dyn Fn(f64, f64) -> f64 + Sync));
    let (exit, integral) = backward_exit_with_forcing(&problem.speed, forcing, t, x, CORNER_TOL)?;
    Ok(match exit.region {
        Region::FromInitial => PointValue { value: (problem.initial)(exit.x_b) + integral, exit, corner_jump: None },
        Region::FromBoundary => PointValue { value: (problem.boundary)(exit.t_b) + integral, exit, corner_jump: None },
        Region::Corner => {
            let from_initial = (problem.initial)(exit.x_b);
            let from_boundary = (problem.boundary)(0.0);
            PointValue { value: from_initial + integral, exit, corner_jump: Some(from_initial - from_boundary) }
        }
    })
}

/// A jump of the data across the corner characteristic, recorded where the
/// grid hit it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerJump {
    pub x: f64,
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MildSolution {
    pub t: f64,
    pub field: ScalarField1D,
    pub regions: Vec<Region>,
    pub corner_jumps: Vec<CornerJump>,
}

/// The mild solution at time `t` on an `n`-node grid.
pub fn solve_mild(problem: &TransportProblem1D, t: f64, n: usize) -> Result<MildSolution> {
    if !(t >= 0.0) {
        return Err(Error::InvalidProblem(format!("negative time {t}")));
    }
    let grid = Grid1D::new(n);
    let mut values = Vec::with_capacity(n);
    let mut regions = Vec::with_capacity(n);
    let mut corner_jumps = Vec::new();
    for j in 0..n {
        let p = evaluate(problem, t, grid.x(j))?;
        if let Some(jump) = p.corner_jump {
            if jump.abs() > JUMP_TOL {
                corner_jumps.push(CornerJump { x: grid.x(j), jump });
            }
        }
        values.push(p.value);
        regions.push(p.exit.region);
    }
    Ok(MildSolution { t, field: ScalarField1D { grid, values }, regions, corner_jumps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutflowTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// When the corner characteristic reaches the outflow point.
    pub corner_time: Option<f64>,
}

/// Time series of the solution at the outflow endpoint on `[0, t_max]`.
pub fn trace_at_outflow(problem: &TransportProblem1D, t_max: f64, samples: usize) -> Result<OutflowTrace> {
    let m = samples.max(2);
    let x_out = problem.speed.sign;
    let mut times = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for k in 0..m {
        let t = t_max * k as f64 / (m - 1) as f64;
        times.push(t);
        values.push(evaluate(problem, t, x_out)?.value);
    }
    Ok(OutflowTrace { times, values, corner_time: corner_exit_time(&problem.speed, t_max)? })
}

/// `sup |d lambda/dt / lambda|` sampled on a lattice of `[0, horizon] x [-1, 1]`.
pub fn relative_time_variation(speed: &SpeedField1D, horizon: f64, samples: usize) -> f64 {
    if speed.autonomous {
        return 0.0;
    }
    let m = samples.max(2);
    let mut worst = 0.0f64;
    for a in 0..m {
        let t = horizon * a as f64 / (m - 1) as f64;
        for b in 0..m {
            let x = -1.0 + 2.0 * b as f64 / (m - 1) as f64;
            let d = (speed.eval(t + FD_STEP, x) - speed.eval((t - FD_STEP).max(0.0), x))
                / (t + FD_STEP - (t - FD_STEP).max(0.0));
            worst = worst.max((d / speed.eval(t, x)).abs());
        }
    }
    worst
}

/// Weight with `alpha lambda_m = 2 sup|dt lambda / lambda| + 2`, which makes
/// the weighted estimate hold with unit constants.
pub fn default_weight(speed: &SpeedField1D, horizon: f64) -> WeightParams {
    let q = relative_time_variation(speed, horizon, 41);
    WeightParams { alpha: (2.0 * q + 2.0) / speed.lambda_m, lambda_m: speed.lambda_m }
}

/// Outcome of checking the weighted sup-norm bound
/// `sup_t ||w f(t)|| <= max(||w f0||, ||w b||) + ||w h|| / (alpha lambda_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSupReport {
    pub alpha: f64,
    pub lambda_m: f64,
    pub initial_norm: f64,
    pub boundary_norm: f64,
    pub forcing_norm: f64,
    pub bound: f64,
    /// `sup_t ||w f(t)||` over the sampled times.
    pub observed: f64,
    pub margin: f64,
    pub holds: bool,
    /// `(t, ||w f(t)||, exp(-alpha lambda_m t) ||w f0||)` per sampled time.
    pub series: Vec<(f64, f64, f64)>,
}

pub fn check_weighted_sup_estimate(
    problem: &TransportProblem1D,
    weight: &WeightParams,
    horizon: f64,
    n: usize,
    time_samples: usize,
) -> Result<WeightedSupReport> {
    if weight.alpha <= 0.0 || weight.lambda_m <= 0.0 {
        return Err(Error::InvalidProblem("weight parameters must be positive".into()));
    }
    let sign = problem.speed.sign;
    // nested refinement so every solution node is also a data sample
    let fine = Grid1D::new(4 * (n - 1) + 1);
    let initial_norm = ScalarField1D::from_fn(fine, |x| (problem.initial)(x)).weighted_sup(weight, sign);
    let m = time_samples.max(2);
    let tfine = 4 * (m - 1) + 1;
    let w_in = weight.weight(problem.speed.inflow_point(), sign);
    let mut boundary_norm = 0.0f64;
    for k in 0..tfine {
        let t = horizon * k as f64 / (tfine - 1) as f64;
        boundary_norm = boundary_norm.max(w_in * (problem.boundary)(t).abs());
    }
    let mut forcing_norm = 0.0f64;
    if problem.forcing.is_some() {
        for k in 0..tfine {
            let t = horizon * k as f64 / (tfine - 1) as f64;
            for j in 0..fine.n {
                let x = fine.x(j);
                forcing_norm = forcing_norm.max(weight.weight(x, sign) * problem.forcing_at(t, x).abs());
            }
        }
    }
    let bound = initial_norm.max(boundary_norm) + forcing_norm / (weight.alpha * weight.lambda_m);
    let mut observed = 0.0f64;
    let mut series = Vec::with_capacity(m);
    for k in 0..m {
        let t = horizon * k as f64 / (m - 1) as f64;
        let sol = solve_mild(problem, t, n)?;
        let v = sol.field.weighted_sup(weight, sign);
        observed = observed.max(v);
        series.push((t, v, (-weight.alpha * weight.lambda_m * t).exp() * initial_norm));
    }
    Ok(WeightedSupReport {
        alpha: weight.alpha,
        lambda_m: weight.lambda_m,
        initial_norm,
        boundary_norm,
        forcing_norm,
        bound,
        observed,
        margin: bound - observed,
        holds: observed <= bound * (1.0 + 1e-9) + 1e-14,
        series,
    })
}

/// Time and space derivatives of the mild solution at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSolution {
    pub dt: ScalarField1D,
    pub dx: ScalarField1D,
    /// Jumps of the derivative data across the corner characteristic.
    pub corner_jumps: Vec<CornerJump>,
}

/// `dt f` solves the same transport problem with data
/// `(-lambda f0' + h(0, .), b', dt h)`; `dx f` then follows from the
/// equation. Only time-independent speeds are supported.
pub fn solve_time_derivative(problem: &TransportProblem1D, t: f64, n: usize) -> Result<DerivativeSolution> {
    if !problem.speed.autonomous {
        return Err(Error::Unsupported("time derivative needs a time-independent speed".into()));
    }
    let base = problem.clone();
    let f0 = problem.initial.clone();
    let f0_dx: ScalarFn = problem
        .initial_dx
        .clone()
        .unwrap_or_else(|| Arc::new(move |x| centered(|y| f0(y.clamp(-1.0, 1.0)), x, -1.0, 1.0)));
    let b = problem.boundary.clone();
    let b_dt: ScalarFn =
        problem.boundary_dt.clone().unwrap_or_else(|| Arc::new(move |s| centered(|y| b(y), s, 0.0, f64::INFINITY)));
    let h_dt: Option<SpaceTimeFn> = match (&problem.forcing_dt, &problem.forcing) {
        (Some(d), _) => Some(d.clone()),
        (None, Some(h)) => {
            let h = h.clone();
            Some(Arc::new(move |s, x| centered(|y| h(y, x), s, 0.0, f64::INFINITY)))
        }
        (None, None) => None,
    };
    let speed = problem.speed.clone();
    let base_for_init = base.clone();
    let deriv = TransportProblem1D {
        speed: problem.speed.clone(),
        initial: Arc::new(move |x| -speed.eval(0.0, x) * f0_dx(x) + base_for_init.forcing_at(0.0, x)),
        boundary: b_dt,
        forcing: h_dt,
        initial_dx: None,
        boundary_dt: None,
        forcing_dt: None,
    };
    let sol = solve_mild(&deriv, t, n)?;
    let grid = sol.field.grid;
    let dx_values = (0..n)
        .map(|j| {
            let x = grid.x(j);
            (base.forcing_at(t, x) - sol.field.values[j]) / problem.speed.eval(t, x)
        })
        .collect();
    Ok(DerivativeSolution {
        dt: sol.field,
        dx: ScalarField1D { grid, values: dx_values },
        corner_jumps: sol.corner_jumps,
    })
}

/// Centered difference kept inside `[lo, hi]` (one-sided at the ends).
fn centered(f: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64) -> f64 {
    let a = (x - FD_STEP).max(lo);
    let b = (x + FD_STEP).min(hi);
    (f(b) - f(a)) / (b - a)
}
