//! Small explicit integrators with boundary-exit events.
//!
//! Two steppers are provided. [`dopri5`] is the adaptive Dormand-Prince 5(4)
//! pair used for analytic right-hand sides. [`rk4_grid`] takes classical RK4
//! steps whose endpoints land on a fixed time grid; it is meant for fields
//! interpolated from time samples, where the interpolant has kinks at the
//! sample times and adaptive error control would stall on them.
//!
//! Both integrate forward or backward in time and can stop at the first zero
//! of an event function `g(t, y)`, which is positive while the state is
//! admissible. The crossing is refined by a bracketed Illinois iteration
//! that re-takes the partial step from the last accepted state.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step magnitude.
    pub h_max: f64,
    pub max_steps: usize,
    /// Absolute tolerance on the event time.
    pub event_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, max_steps: 200_000, event_tol: 1e-12 }
    }
}

/// End state of an integration.
#[derive(Debug, Clone, Copy)]
pub struct OdeEnd<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    /// True when the event fired before the requested final time.
    pub event: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const D: usize>(y: &[f64; D], terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += c * k[i];
        }
    }
    out
}

/// One Dormand-Prince step. Returns the 5th order solution and the error
/// estimate vector.
fn dp_step<const D: usize, F>(f: &F, t: f64, y: &[f64; D], k1: &[f64; D], h: f64) -> ([f64; D], [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k2 = f(t + C2 * h, &axpy(y, &[(h * A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
    let k5 = f(t + C5 * h, &axpy(y, &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
    let k6 = f(
        t + h,
        &axpy(y, &[(h * A61, k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]),
    );
    let y5 = axpy(y, &[(h * B1, k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
    let k7 = f(t + h, &y5);
    let mut err = [0.0; D];
    for i in 0..D {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

/// Bracketed root refinement of `g(s) = 0` for `s` in `[lo, hi]` with
/// `g(lo) > 0 >= g(hi)`. Illinois-modified regula falsi, falling back to
/// bisection when the secant estimate leaves the bracket.
pub fn refine_crossing<G>(g: G, mut lo: f64, mut g_lo: f64, mut hi: f64, mut g_hi: f64, tol: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    let mut side = 0i8;
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mut s = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !s.is_finite() || s <= lo.min(hi) || s >= lo.max(hi) {
            s = 0.5 * (lo + hi);
        }
        let gs = g(s);
        if gs > 0.0 {
            lo = s;
            g_lo = gs;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            g_hi = gs;
            if gs == 0.0 {
                break;
            }
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    hi
}

/// Adaptive Dormand-Prince integration from `t0` to `t1` (either direction)
/// stopping at the first zero of `event`.
pub fn dopri5<const D: usize, F, G>(f: F, t0: f64, y0: [f64; D], t1: f64, opts: &OdeOptions, event: G) -> Result<OdeEnd<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    G: Fn(f64, &[f64; D]) -> f64,
{
    if event(t0, &y0) <= 0.0 {
        return Ok(OdeEnd { t: t0, y: y0, event: true });
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(OdeEnd { t: t0, y: y0, event: false });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = (0.05 * span).min(opts.h_max).max(1e-6 * span);
    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * span.max(1.0) {
            return Ok(OdeEnd { t: t1, y, event: false });
        }
        let step = h.min(remaining).min(opts.h_max);
        let (y_new, err) = dp_step(&f, t, &y, &k1, dir * step);
        let mut e2 = 0.0;
        for i in 0..D {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            e2 += (err[i] / sc).powi(2);
        }
        let en = (e2 / D as f64).sqrt();
        if !en.is_finite() {
            h = step * 0.25;
            if h < 1e-15 * span.max(1.0) {
                return Err(Error::Ode("non-finite right-hand side".into()));
            }
            continue;
        }
        if en <= 1.0 {
            let t_new = if step == remaining { t1 } else { t + dir * step };
            if event(t_new, &y_new) <= 0.0 {
                let g0 = event(t, &y);
                let g1 = event(t_new, &y_new);
                let (ts, ys, k1s) = (t, y, k1);
                let state_at = |s: f64| dp_step(&f, ts, &ys, &k1s, dir * s).0;
                let s = refine_crossing(|s| event(ts + dir * s, &state_at(s)), 0.0, g0, step, g1, opts.event_tol);
                return Ok(OdeEnd { t: ts + dir * s, y: state_at(s), event: true });
            }
            t = t_new;
            y = y_new;
            k1 = f(t, &y);
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * fac;
        } else {
            h = step * (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Err(Error::Ode(format!("step budget {} exhausted", opts.max_steps)))
}

#[inline]
fn rk4_step<const D: usize, F>(f: &F, t: f64, y: &[f64; D], h: f64) -> [f64; D]
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k1)]));
    let k3 = f(t + 0.5 * h, &axpy(y, &[(0.5 * h, &k2)]));
    let k4 = f(t + h, &axpy(y, &[(h, &k3)]));
    axpy(y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)])
}

/// Fixed-step RK4 from `t0` to `t1` with step endpoints on the grid
/// `k * dt_grid / substeps`. Event handling as in [`dopri5`].
pub fn rk4_grid<const D: usize, F, G>(
    f: F,
    t0: f64,
    y0: [f64; D],
    t1: f64,
    dt_grid: f64,
    substeps: usize,
    event_tol: f64,
    event: G,
) -> OdeEnd<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    G: Fn(f64, &[f64; D]) -> f64,
{
    if event(t0, &y0) <= 0.0 {
        return OdeEnd { t: t0, y: y0, event: true };
    }
    let dt = dt_grid / substeps.max(1) as f64;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    loop {
        if (t1 - t) * dir <= 1e-13 * dt {
            return OdeEnd { t: t1, y, event: false };
        }
        // next grid point strictly beyond t in the direction of travel
        let q = t / dt;
        let mut next = if dir > 0.0 { (q + 1e-9).floor() + 1.0 } else { (q - 1e-9).ceil() - 1.0 } * dt;
        if (next - t1) * dir > 0.0 {
            next = t1;
        }
        let h = next - t;
        let y_new = rk4_step(&f, t, &y, h);
        if event(next, &y_new) <= 0.0 {
            let g0 = event(t, &y);
            let g1 = event(next, &y_new);
            let (ts, ys) = (t, y);
            let s = refine_crossing(
                |s| event(ts + dir * s, &rk4_step(&f, ts, &ys, dir * s)),
                0.0,
                g0,
                h.abs(),
                g1,
                event_tol,
            );
            return OdeEnd { t: ts + dir * s, y: rk4_step(&f, ts, &ys, dir * s), event: true };
        }
        t = next;
        y = y_new;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let end = dopri5(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 3.0, &OdeOptions::default(), |_, _| 1.0).unwrap();
        assert!((end.y[0] - (-3.0f64).exp()).abs() < 1e-9);
        assert!(!end.event);
    }

    #[test]
    fn backward_integration_reaches_start() {
        let end = dopri5(|t, _y: &[f64; 1]| [t.cos()], 2.0, [2f64.sin()], 0.0, &OdeOptions::default(), |_, _| 1.0).unwrap();
        assert!(end.y[0].abs() < 1e-9);
    }

    #[test]
    fn event_located_to_tolerance() {
        // x' = 1 from x = 0 hits x = 0.3 at t = 0.3
        let end = dopri5(|_, _y: &[f64; 1]| [1.0], 0.0, [0.0], 1.0, &OdeOptions::default(), |_, y| 0.3 - y[0]).unwrap();
        assert!(end.event);
        assert!((end.t - 0.3).abs() < 1e-11);
    }

    #[test]
    fn nonlinear_event_refined() {
        // x' = x, x(0) = 1 reaches 2 at ln 2
        let end = dopri5(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 5.0, &OdeOptions::default(), |_, y| 2.0 - y[0]).unwrap();
        assert!((end.t - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn grid_rk4_hits_grid_and_event() {
        let end = rk4_grid(|_, _y: &[f64; 1]| [-2.0], 1.0, [0.0], 0.0, 0.1, 1, 1e-12, |_, y| 0.5 - y[0]);
        assert!(end.event);
        assert!((end.t - 0.75).abs() < 1e-12);
        let end = rk4_grid(|t, _y: &[f64; 1]| [t * t], 0.0, [0.0], 1.0, 0.1, 2, 1e-12, |_, _| 1.0);
        assert!((end.y[0] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn starting_outside_fires_immediately() {
        let end = dopri5(|_, _y: &[f64; 1]| [1.0], 0.0, [0.0], 1.0, &OdeOptions::default(), |_, _| 0.0).unwrap();
        assert!(end.event && end.t == 0.0);
    }
}
