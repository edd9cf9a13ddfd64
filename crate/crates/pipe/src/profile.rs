//! Shear profiles `u_s = (U(x2, x3), 0, 0)` and their vorticity
//! `omega_s = (0, d3 U, -d2 U)`.

use std::f64::consts::PI;

use crate::grid::{Grid3, VectorField3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShearProfile {
    /// `U = c`.
    Plug { c: f64 },
    /// `U = c + cos(m pi x2)`.
    CosineShear { c: f64, m: u32 },
    /// `U = c + cos(pi x2) cos(pi x3)`.
    ProductCosine { c: f64 },
}

impl ShearProfile {
    pub fn speed(&self, x2: f64, x3: f64) -> f64 {
        match *self {
            ShearProfile::Plug { c } => c,
            ShearProfile::CosineShear { c, m } => c + (m as f64 * PI * x2).cos(),
            ShearProfile::ProductCosine { c } => c + (PI * x2).cos() * (PI * x3).cos(),
        }
    }

    /// `(d2 U, d3 U)`.
    pub fn gradient(&self, x2: f64, x3: f64) -> [f64; 2] {
        match *self {
            ShearProfile::Plug { .. } => [0.0, 0.0],
            ShearProfile::CosineShear { m, .. } => {
                let k = m as f64 * PI;
                [-k * (k * x2).sin(), 0.0]
            }
            ShearProfile::ProductCosine { .. } => {
                let (s2, c2) = (PI * x2).sin_cos();
                let (s3, c3) = (PI * x3).sin_cos();
                [-PI * s2 * c3, -PI * c2 * s3]
            }
        }
    }

    /// `[[d22 U, d23 U], [d23 U, d33 U]]`.
    pub fn hessian(&self, x2: f64, x3: f64) -> [[f64; 2]; 2] {
        match *self {
            ShearProfile::Plug { .. } => [[0.0; 2]; 2],
            ShearProfile::CosineShear { m, .. } => {
                let k = m as f64 * PI;
                [[-k * k * (k * x2).cos(), 0.0], [0.0, 0.0]]
            }
            ShearProfile::ProductCosine { .. } => {
                let (s2, c2) = (PI * x2).sin_cos();
                let (s3, c3) = (PI * x3).sin_cos();
                let p2 = PI * PI;
                [[-p2 * c2 * c3, p2 * s2 * s3], [p2 * s2 * s3, -p2 * c2 * c3]]
            }
        }
    }

    /// Third derivatives `d_{2^a 3^b} U` indexed by `a` (`b = 3 - a`).
    pub fn third(&self, x2: f64, x3: f64) -> [f64; 4] {
        match *self {
            ShearProfile::Plug { .. } => [0.0; 4],
            ShearProfile::CosineShear { m, .. } => {
                let k = m as f64 * PI;
                [0.0, 0.0, 0.0, k * k * k * (k * x2).sin()]
            }
            ShearProfile::ProductCosine { .. } => {
                let (s2, c2) = (PI * x2).sin_cos();
                let (s3, c3) = (PI * x3).sin_cos();
                let p3 = PI * PI * PI;
                // index a counts derivatives in x2
                [p3 * c2 * s3, p3 * s2 * c3, p3 * c2 * s3, p3 * s2 * c3]
            }
        }
    }

    /// Shear velocity `(U, 0, 0)` at a point.
    pub fn velocity(&self, x: [f64; 3]) -> [f64; 3] {
        [self.speed(x[1], x[2]), 0.0, 0.0]
    }

    /// `omega_s = (0, d3 U, -d2 U)` at a point.
    pub fn vorticity(&self, x: [f64; 3]) -> [f64; 3] {
        let g = self.gradient(x[1], x[2]);
        [0.0, g[1], -g[0]]
    }

    /// `J[i][j] = d omega_s_i / d x_j`.
    pub fn vorticity_jacobian(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        let h = self.hessian(x[1], x[2]);
        [[0.0; 3], [0.0, h[1][0], h[1][1]], [0.0, -h[0][0], -h[0][1]]]
    }

    pub fn min_speed(&self, grid: &Grid3) -> f64 {
        let mut m = f64::INFINITY;
        for a in 0..grid.n {
            for b in 0..grid.n {
                m = m.min(self.speed(grid.x(a), grid.x(b)));
            }
        }
        m
    }

    pub fn max_speed(&self, grid: &Grid3) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for a in 0..grid.n {
            for b in 0..grid.n {
                m = m.max(self.speed(grid.x(a), grid.x(b)));
            }
        }
        m
    }

    /// `max |d_i U|` on the faces `x_i = ±1`, sampled along the faces.
    pub fn lateral_gradient_residual(&self, samples: usize) -> f64 {
        let m = samples.max(2);
        let mut worst = 0.0f64;
        for k in 0..m {
            let s = -1.0 + 2.0 * k as f64 / (m - 1) as f64;
            for face in [-1.0, 1.0] {
                worst = worst.max(self.gradient(face, s)[0].abs());
                worst = worst.max(self.gradient(s, face)[1].abs());
            }
        }
        worst
    }

    pub fn shear_vorticity(&self, grid: Grid3) -> VectorField3 {
        VectorField3::from_fn(grid, |x| self.vorticity(x))
    }

    /// Size of `grad U` against the budget shape `delta min U^2 / (1 + min U)`.
    /// The norm is `||(d2 U, d3 U)||_{W^{2,p}}` over the cross-section.
    pub fn smallness(&self, grid: &Grid3, p: f64, delta: f64) -> SmallnessReport {
        let n = grid.n;
        let mut total = 0.0;
        for a in 0..n {
            for b in 0..n {
                let (x2, x3) = (grid.x(a), grid.x(b));
                let g = self.gradient(x2, x3);
                let h = self.hessian(x2, x3);
                let t = self.third(x2, x3);
                // derivatives of d2 U then of d3 U, mixed ones counted twice
                let terms = [
                    (g[0], 1.0),
                    (g[1], 1.0),
                    (h[0][0], 1.0),
                    (h[0][1], 2.0),
                    (h[1][1], 1.0),
                    (t[3], 1.0),
                    (t[2], 3.0),
                    (t[1], 3.0),
                    (t[0], 1.0),
                ];
                let s: f64 = terms.iter().map(|(v, m)| m * v.abs().powf(p)).sum();
                total += grid.face_weight(a, b) * s;
            }
        }
        let grad_norm = total.powf(1.0 / p);
        let u_min = self.min_speed(grid);
        let allowance = delta * u_min * u_min / (1.0 + u_min);
        SmallnessReport { grad_norm, u_min, allowance, holds: grad_norm <= allowance }
    }
}

/// `||grad U||_{W^{2,p}(D)}` against `delta min U^2 / (1 + min U)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessReport {
    pub grad_norm: f64,
    pub u_min: f64,
    pub allowance: f64,
    pub holds: bool,
}
