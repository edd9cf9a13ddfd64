//! Inflow and outflow data: the normal velocity on both end faces and the
//! vorticity entering through `x1 = -1`.

use std::sync::Arc;

/// Scalar datum on an end face, as a function of `(t, x2, x3)`.
pub type FaceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
/// Vector datum on an end face, as a function of `(t, x2, x3)`.
pub type FaceVecFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;

const TIME_STEP: f64 = 1e-5;

#[derive(Clone)]
pub struct PipeBoundaryData {
    /// Normal velocity `v1` on the inflow face `x1 = -1`.
    pub v_in: FaceFn,
    /// Normal velocity `v1` on the outflow face `x1 = 1`.
    pub v_out: FaceFn,
    /// Vorticity on the inflow face.
    pub omega_in: FaceVecFn,
}

impl std::fmt::Debug for PipeBoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PipeBoundaryData").finish_non_exhaustive()
    }
}

impl PipeBoundaryData {
    pub fn new(
        v_in: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        v_out: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        omega_in: impl Fn(f64, f64, f64) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        Self { v_in: Arc::new(v_in), v_out: Arc::new(v_out), omega_in: Arc::new(omega_in) }
    }

    pub fn zero() -> Self {
        Self::new(|_, _, _| 0.0, |_, _, _| 0.0, |_, _, _| [0.0; 3])
    }

    /// Uniform plug `v1 = c` through both end faces.
    pub fn plug(c: f64) -> Self {
        Self::new(move |_, _, _| c, move |_, _, _| c, |_, _, _| [0.0; 3])
    }

    /// Uniform pulse `v1 = a eta(t)` through both faces, no inflow vorticity.
    pub fn pulse(amplitude: f64) -> Self {
        Self::new(move |t, _, _| amplitude * pulse_shape(t), move |t, _, _| amplitude * pulse_shape(t), |_, _, _| [0.0; 3])
    }

    /// Time derivative of the normal data by central differences, one-sided
    /// at `t = 0`.
    pub fn dt_normal(&self, t: f64, x2: f64, x3: f64, outflow: bool) -> f64 {
        let f = if outflow { &self.v_out } else { &self.v_in };
        let lo = (t - TIME_STEP).max(0.0);
        let hi = t + TIME_STEP;
        (f(hi, x2, x3) - f(lo, x2, x3)) / (hi - lo)
    }

    pub fn dt_vorticity(&self, t: f64, x2: f64, x3: f64) -> [f64; 3] {
        let lo = (t - TIME_STEP).max(0.0);
        let hi = t + TIME_STEP;
        let (a, b) = ((self.omega_in)(hi, x2, x3), (self.omega_in)(lo, x2, x3));
        [(a[0] - b[0]) / (hi - lo), (a[1] - b[1]) / (hi - lo), (a[2] - b[2]) / (hi - lo)]
    }
}

/// Smooth pulse `(t/2)^3 exp(3 (1 - t/2))`, vanishing to third order at
/// `t = 0` with peak value one at `t = 2`.
pub fn pulse_shape(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let s = 0.5 * t;
    s * s * s * (3.0 * (1.0 - s)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_peaks_at_two() {
        assert!((pulse_shape(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(pulse_shape(0.0), 0.0);
        assert!(pulse_shape(1.9) < 1.0 && pulse_shape(2.1) < 1.0);
        let b = PipeBoundaryData::pulse(1.0);
        let d = b.dt_normal(1.0, 0.0, 0.0, false);
        // d/dt of s^3 e^{3(1-s)} at s = 1/2 is (3/2) s^2 (1 - s) e^{3(1-s)}
        let exact = 1.5 * 0.25 * 0.5 * (1.5f64).exp();
        assert!((d - exact).abs() < 1e-8);
    }
}
