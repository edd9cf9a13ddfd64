//! Characteristic curves `dX/ds = lambda(s, X)` of a scalar speed on
//! `[-1, 1]`.
//!
//! The speed has a fixed sign, so every backward characteristic from a point
//! `(t, x)` either reaches `s = 0` inside the interval or leaves through the
//! inflow endpoint `x = -sign` at some positive time. The curve issued from
//! the corner `(0, -sign)` separates the two cases.

use std::fmt;
use std::sync::Arc;

use crate::ode::{dopri5, rk4_grid, OdeOptions};
use crate::{Error, Result};

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// How characteristics are integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepping {
    /// Dormand-Prince with the given relative tolerance.
    Adaptive { rtol: f64 },
    /// RK4 with steps aligned to a time grid of spacing `dt`, split into
    /// `substeps`. Used for speeds interpolated from time samples.
    Grid { dt: f64, substeps: usize },
}

/// A scalar characteristic speed with the bounds the transport estimates
/// depend on.
#[derive(Clone)]
pub struct SpeedField1D {
    eval: SpaceTimeFn,
    /// Lower bound on `|lambda|`.
    pub lambda_m: f64,
    /// Bound on `|d lambda / dx|`.
    pub lip_bound: f64,
    /// `+1` for rightward transport, `-1` for leftward.
    pub sign: f64,
    /// True when the speed does not depend on time.
    pub autonomous: bool,
    pub stepping: Stepping,
}

impl fmt::Debug for SpeedField1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpeedField1D")
            .field("lambda_m", &self.lambda_m)
            .field("lip_bound", &self.lip_bound)
            .field("sign", &self.sign)
            .field("autonomous", &self.autonomous)
            .finish()
    }
}

impl SpeedField1D {
    pub fn new(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        lambda_m: f64,
        lip_bound: f64,
        sign: f64,
        autonomous: bool,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            lambda_m,
            lip_bound,
            sign: sign.signum(),
            autonomous,
            stepping: Stepping::Adaptive { rtol: 1e-11 },
        }
    }

    pub fn constant(c: f64) -> Self {
        assert!(c != 0.0, "constant speed must be nonzero");
        Self::new(move |_, _| c, c.abs(), 0.0, c.signum(), true)
    }

    /// `lambda(x) = a + b x`, required to keep one sign on `[-1, 1]`.
    pub fn affine(a: f64, b: f64) -> Self {
        let lo = (a - b.abs()).min(a + b.abs());
        let hi = (a - b.abs()).max(a + b.abs());
        assert!(lo * hi > 0.0, "affine speed changes sign on [-1, 1]");
        Self::new(move |_, x| a + b * x, lo.abs().min(hi.abs()), b.abs(), a.signum(), true)
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.eval)(t, x.clamp(-1.0, 1.0))
    }

    /// Endpoint where characteristics enter.
    pub fn inflow_point(&self) -> f64 {
        -self.sign
    }

    /// Check the declared sign and floor on a sample lattice of
    /// `[0, horizon] x [-1, 1]`.
    pub fn validate(&self, horizon: f64, samples: usize) -> Result<()> {
        let m = samples.max(2);
        for a in 0..m {
            let t = horizon * a as f64 / (m - 1) as f64;
            for b in 0..m {
                let x = -1.0 + 2.0 * b as f64 / (m - 1) as f64;
                let l = self.eval(t, x);
                if !l.is_finite() || l * self.sign < self.lambda_m * (1.0 - 1e-12) {
                    return Err(Error::InvalidProblem(format!(
                        "speed {l:.6e} at (t, x) = ({t}, {x}) violates sign {} or floor {}",
                        self.sign, self.lambda_m
                    )));
                }
            }
        }
        Ok(())
    }
}

/// End of a traced path segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnd {
    /// Time where the path stopped.
    pub tau: f64,
    pub x: f64,
    /// True when the path left `[-1, 1]` before reaching the requested time.
    pub exited: bool,
    /// Integral of the forcing along the path over the traversed time
    /// interval, oriented from the earlier to the later time.
    pub integral: f64,
}

/// Which part of the space-time strip a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Backward characteristic reaches `t = 0` inside the interval.
    FromInitial,
    /// Backward characteristic leaves through the inflow endpoint.
    FromBoundary,
    /// On the corner characteristic.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitRecord {
    pub t_b: f64,
    pub x_b: f64,
    pub region: Region,
}

/// Follow the characteristic through `(t, x)` to time `tau` (either
/// direction), integrating `forcing` along it. Stops at the endpoint the path
/// reaches first: the inflow point when going backward, the outflow point
/// when going forward.
pub fn flow_with_forcing(
    speed: &SpeedField1D,
    forcing: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
    t: f64,
    x: f64,
    tau: f64,
) -> Result<PathEnd> {
    if tau == t {
        return Ok(PathEnd { tau, x, exited: false, integral: 0.0 });
    }
    let backward = tau < t;
    let s = speed.sign;
    // positive while inside; zero on the endpoint the path can leave through
    let event = move |_: f64, y: &[f64; 2]| if backward { 1.0 + s * y[0] } else { 1.0 - s * y[0] };
    let rhs = |tt: f64, y: &[f64; 2]| {
        let xc = y[0].clamp(-1.0, 1.0);
        [speed.eval(tt, xc), forcing.map_or(0.0, |h| h(tt, xc))]
    };
    let end = match speed.stepping {
        Stepping::Adaptive { rtol } => {
            let opts = OdeOptions { rtol, atol: 1e-13, ..OdeOptions::default() };
            dopri5(rhs, t, [x, 0.0], tau, &opts, event)?
        }
        Stepping::Grid { dt, substeps } => rk4_grid(rhs, t, [x, 0.0], tau, dt, substeps, 1e-12, event),
    };
    let mut xe = end.y[0];
    if end.event {
        xe = if backward { -s } else { s };
    }
    let integral = if backward { -end.y[1] } else { end.y[1] };
    Ok(PathEnd { tau: end.t, x: xe, exited: end.event, integral })
}

/// `X(tau; t, x)` for `tau <= t`. If the curve leaves the interval first the
/// exit point is returned with `exited = true`.
pub fn trace(speed: &SpeedField1D, t: f64, x: f64, tau: f64) -> Result<PathEnd> {
    if tau > t {
        return Err(Error::InvalidProblem(format!("trace needs tau <= t, got tau = {tau}, t = {t}")));
    }
    check_point(t, x)?;
    flow_with_forcing(speed, None, t, x, tau)
}

fn check_point(t: f64, x: f64) -> Result<()> {
    if !(t >= 0.0) || !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidProblem(format!("point ({t}, {x}) outside [0, inf) x [-1, 1]")));
    }
    Ok(())
}

/// Classify `(t, x)` by where its backward characteristic starts.
///
/// Points within `tol_gamma` of the corner characteristic (in position at
/// `t = 0`, or in exit time at the inflow point) are reported as
/// [`Region::Corner`] with the corner as foot point.
pub fn backward_exit(speed: &SpeedField1D, t: f64, x: f64, tol_gamma: f64) -> Result<ExitRecord> {
    let (rec, _) = backward_exit_with_forcing(speed, None, t, x, tol_gamma)?;
    Ok(rec)
}

/// As [`backward_exit`], also returning the forcing integral from the foot
/// point up to `t`.
pub fn backward_exit_with_forcing(
    speed: &SpeedField1D,
    forcing: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
    t: f64,
    x: f64,
    tol_gamma: f64,
) -> Result<(ExitRecord, f64)> {
    check_point(t, x)?;
    let corner = speed.inflow_point();
    let end = flow_with_forcing(speed, forcing, t, x, 0.0)?;
    let rec = if end.exited {
        if end.tau <= tol_gamma {
            ExitRecord { t_b: 0.0, x_b: corner, region: Region::Corner }
        } else {
            ExitRecord { t_b: end.tau, x_b: corner, region: Region::FromBoundary }
        }
    } else if (end.x - corner).abs() <= tol_gamma {
        ExitRecord { t_b: 0.0, x_b: corner, region: Region::Corner }
    } else {
        ExitRecord { t_b: 0.0, x_b: end.x, region: Region::FromInitial }
    };
    Ok((rec, end.integral))
}

/// Time at which the corner characteristic reaches the outflow point, if it
/// does so before `t_max`.
pub fn corner_exit_time(speed: &SpeedField1D, t_max: f64) -> Result<Option<f64>> {
    let end = flow_with_forcing(speed, None, 0.0, speed.inflow_point(), t_max)?;
    // leaving immediately from the corner is not possible for a sign-definite speed
    Ok(if end.exited && end.tau > 0.0 { Some(end.tau) } else { None })
}

/// Samples `(t, x)` of the corner characteristic on `[0, min(t_max, exit)]`,
/// uniformly spaced in time and ending at the exit point when it exits.
pub fn gamma_curve(speed: &SpeedField1D, t_max: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    let m = samples.max(2);
    let t_end = corner_exit_time(speed, t_max)?.unwrap_or(t_max);
    let mut out = Vec::with_capacity(m);
    let mut t_prev = 0.0;
    let mut x_prev = speed.inflow_point();
    out.push((0.0, x_prev));
    for k in 1..m {
        let tk = t_end * k as f64 / (m - 1) as f64;
        let end = flow_with_forcing(speed, None, t_prev, x_prev, tk)?;
        t_prev = tk;
        x_prev = if k == m - 1 && end.exited { speed.sign } else { end.x };
        out.push((tk, x_prev));
    }
    Ok(out)
}
