//! Velocity from vorticity: `curl v = omega`, `div v = 0`, `v . nu = 0` on
//! the lateral walls and `v1` prescribed on both end faces.
//!
//! The normal data are lifted by a harmonic `psi` with `d1 psi = v1` on the
//! end faces and zero slope on the walls. The rest solves `-Δv* = curl omega`
//! componentwise: `v*1` vanishes on the end faces, the tangential
//! components take the slopes `d1 v*2 = omega3`, `d1 v*3 = -omega2` there,
//! and on the walls the normal component vanishes while the tangential ones
//! have zero slope.

use crate::error::{PipeError, Result};
use crate::grid::{derivative, Grid3, Parity, ScalarField3, VectorField3, VectorKind, SCALAR_EVEN};
use crate::poisson::{EndCondition, PoissonSolver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivCurlOptions {
    pub p: f64,
    /// Relative flux mismatch treated as a genuine imbalance.
    pub flux_tol: f64,
    /// Relative `||curl v - omega||_p` above which the solve is rejected.
    pub curl_tol: f64,
}

impl Default for DivCurlOptions {
    fn default() -> Self {
        Self { p: 4.0, flux_tol: 1e-6, curl_tol: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivCurlSolution {
    pub v: VectorField3,
    pub psi: ScalarField3,
    /// Net flux through the end faces under the face quadrature.
    pub imbalance: f64,
    /// `||curl v - omega||_p / ||omega||_p` (absolute when omega vanishes).
    pub curl_residual: f64,
    /// `||div v||_p / ||v||_{W^{1,p}}` (absolute when v vanishes).
    pub div_residual: f64,
    /// `||v||_{W^{1,p}} / (||omega||_p + ||v_b||_p)`.
    pub first_order_constant: f64,
    /// `||v||_{W^{2,p}} / (||omega||_{W^{1,p}} + ||v_b||_{W^{1,p}})`.
    pub second_order_constant: f64,
}

#[derive(Debug, Clone)]
pub struct DivCurlSolver {
    pub grid: Grid3,
    pub opts: DivCurlOptions,
    poisson: PoissonSolver,
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

/// `||d||_p + ||grad d||_p` on a face, by differences along the face.
fn face_w1p(grid: &Grid3, d: &[f64], p: f64) -> f64 {
    let n = grid.n;
    let h = grid.dx();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            let da = if a == 0 || a == n - 1 { 0.0 } else { (d[(a + 1) * n + b] - d[(a - 1) * n + b]) / (2.0 * h) };
            let db = if b == 0 || b == n - 1 { 0.0 } else { (d[a * n + b + 1] - d[a * n + b - 1]) / (2.0 * h) };
            s += grid.face_weight(a, b) * (d[a * n + b].abs().powf(p) + da.abs().powf(p) + db.abs().powf(p));
        }
    }
    s.powf(1.0 / p)
}

impl DivCurlSolver {
    pub fn new(grid: Grid3, opts: DivCurlOptions) -> Self {
        Self { grid, opts, poisson: PoissonSolver::new(grid) }
    }

    /// Face samples of a component on an end face, indexed `a * n + b`.
    fn face(&self, f: &VectorField3, comp: usize, i1: usize, sign: f64) -> Vec<f64> {
        let n = self.grid.n;
        (0..n * n).map(|k| sign * f.data[i1 * n * n + k][comp]).collect()
    }

    pub fn solve(&self, omega: &VectorField3, v_in: &[f64], v_out: &[f64]) -> Result<DivCurlSolution> {
        let g = self.grid;
        let n = g.n;
        let p = self.opts.p;
        let zero = vec![0.0; g.len()];
        let lift = self.poisson.solve(
            &zero,
            [Parity::Even, Parity::Even],
            EndCondition::Slope(v_in),
            EndCondition::Slope(v_out),
        );
        let scale = face_lp(&g, v_in, 1.0) + face_lp(&g, v_out, 1.0);
        if lift.imbalance.abs() > self.opts.flux_tol * scale + 1e-12 {
            return Err(PipeError::NoSolution(format!(
                "inflow and outflow fluxes differ by {:.6e}",
                lift.imbalance
            )));
        }
        let psi = lift.field;
        let curl_w = omega.curl(VectorKind::Axial);
        let rhs = |c: usize| curl_w.component(c);
        let lat = |c: usize| {
            let par = VectorKind::Polar.parities(c);
            [par[1], par[2]]
        };
        let v1 = self.poisson.solve(&rhs(0), lat(0), EndCondition::ZeroValue, EndCondition::ZeroValue).field;
        let (w3_in, w3_out) = (self.face(omega, 2, 0, 1.0), self.face(omega, 2, n - 1, 1.0));
        let v2 = self
            .poisson
            .solve(&rhs(1), lat(1), EndCondition::Slope(&w3_in), EndCondition::Slope(&w3_out))
            .field;
        let (w2_in, w2_out) = (self.face(omega, 1, 0, -1.0), self.face(omega, 1, n - 1, -1.0));
        let v3 = self
            .poisson
            .solve(&rhs(2), lat(2), EndCondition::Slope(&w2_in), EndCondition::Slope(&w2_out))
            .field;
        let mut grad: Vec<Vec<f64>> = (0..3).map(|a| derivative(&g, &psi, a, SCALAR_EVEN)).collect();
        for k in 0..n * n {
            grad[0][k] = v_in[k];
            grad[0][(n - 1) * n * n + k] = v_out[k];
        }
        let mut v = VectorField3::from_components(g, [&v1, &v2, &v3]);
        for (i, val) in v.data.iter_mut().enumerate() {
            for c in 0..3 {
                val[c] += grad[c][i];
            }
        }
        let w_norm = omega.lp_norm(p);
        let curl_gap = v.curl(VectorKind::Polar).sub(omega).lp_norm(p);
        let curl_residual = if w_norm > 0.0 { curl_gap / w_norm } else { curl_gap };
        let v_w1 = v.sobolev_norm(VectorKind::Polar, 1, p);
        let div = v.divergence(VectorKind::Polar).lp_norm(p);
        let div_residual = if v_w1 > 0.0 { div / v_w1 } else { div };
        if curl_residual > self.opts.curl_tol {
            return Err(PipeError::SolverFailure(format!("curl residual {curl_residual:.3e}")));
        }
        let data0 = w_norm + face_lp(&g, v_in, p) + face_lp(&g, v_out, p);
        let data1 = omega.sobolev_norm(VectorKind::Axial, 1, p) + face_w1p(&g, v_in, p) + face_w1p(&g, v_out, p);
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        Ok(DivCurlSolution {
            first_order_constant: ratio(v_w1, data0),
            second_order_constant: ratio(v.sobolev_norm(VectorKind::Polar, 2, p), data1),
            v,
            psi: ScalarField3 { grid: g, data: psi },
            imbalance: lift.imbalance,
            curl_residual,
            div_residual,
        })
    }
}

/// Face samples of `f(x2, x3)` indexed `a * n + b`.
pub fn sample_face(grid: &Grid3, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = grid.n;
    (0..n * n).map(|k| f(grid.x(k / n), grid.x(k % n))).collect()
}
