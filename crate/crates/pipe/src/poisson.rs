//! Poisson solves `-Δf = r` on the pipe grid.
//!
//! The lateral directions are diagonalized by discrete sine (odd parity,
//! zero on the face) or cosine (even parity, zero slope) bases on the nodes;
//! the remaining second difference in `x1` is a tridiagonal solve per mode
//! with either a value or a slope prescribed on each end face.

use nalgebra::DMatrix;

use crate::grid::{Grid3, Parity};

/// Dense node-to-mode transform for one lateral direction.
#[derive(Debug, Clone)]
struct Basis {
    /// Row-major `n x n`, mode coefficients from nodal values.
    forward: Vec<f64>,
    /// Row-major `n x n`, nodal values from mode coefficients.
    inverse: Vec<f64>,
    /// Eigenvalue of the reflected second difference for each mode.
    eig: Vec<f64>,
}

impl Basis {
    fn new(n: usize, h: f64, odd: bool) -> Self {
        let big_n = (n - 1) as f64;
        let mut b = DMatrix::<f64>::zeros(n, n);
        let mut eig = vec![0.0; n];
        for m in 0..n {
            let s = (m as f64 * std::f64::consts::PI / (2.0 * big_n)).sin();
            eig[m] = -4.0 * s * s / (h * h);
        }
        if odd {
            // modes 1..n-2 on interior nodes; boundary rows and modes 0, n-1 inert
            for j in 0..n {
                for m in 0..n {
                    b[(j, m)] = if (1..n - 1).contains(&j) && (1..n - 1).contains(&m) {
                        (m as f64 * std::f64::consts::PI * j as f64 / big_n).sin()
                    } else if j == m {
                        1.0
                    } else {
                        0.0
                    };
                }
            }
            eig[0] = f64::NAN;
            eig[n - 1] = f64::NAN;
        } else {
            for j in 0..n {
                for m in 0..n {
                    b[(j, m)] = (m as f64 * std::f64::consts::PI * j as f64 / big_n).cos();
                }
            }
        }
        let inv = b.clone().try_inverse().expect("trigonometric basis is invertible");
        let flat = |m: &DMatrix<f64>| {
            let mut v = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    v[i * n + j] = m[(i, j)];
                }
            }
            v
        };
        Self { forward: flat(&inv), inverse: flat(&b), eig }
    }
}

/// What an end face prescribes for the solution, as `n x n` face samples
/// indexed `a * n + b` for `(x2, x3)` node `(a, b)`.
#[derive(Debug, Clone, Copy)]
pub enum EndCondition<'a> {
    Value(&'a [f64]),
    /// `d f / d x1` on the face.
    Slope(&'a [f64]),
    ZeroValue,
    ZeroSlope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub field: Vec<f64>,
    /// For a pure slope problem, the net source `∫ r + ∫_{in} g - ∫_{out} g`
    /// under the discrete quadrature, which was removed before solving.
    pub imbalance: f64,
}

#[derive(Debug, Clone)]
pub struct PoissonSolver {
    pub grid: Grid3,
    even: Basis,
    odd: Basis,
}

/// `out = A * P * B^T` for `n x n` row-major matrices.
fn sandwich(a: &[f64], p: &[f64], b: &[f64], n: usize, tmp: &mut [f64], out: &mut [f64]) {
    // tmp = A P
    for i in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += a[i * n + j] * p[j * n + k];
            }
            tmp[i * n + k] = s;
        }
    }
    // out = tmp B^T
    for i in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += tmp[i * n + j] * b[k * n + j];
            }
            out[i * n + k] = s;
        }
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..m {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

impl PoissonSolver {
    pub fn new(grid: Grid3) -> Self {
        let h = grid.dx();
        Self { grid, even: Basis::new(grid.n, h, false), odd: Basis::new(grid.n, h, true) }
    }

    fn basis(&self, p: Parity) -> &Basis {
        match p {
            Parity::Odd => &self.odd,
            _ => &self.even,
        }
    }

    fn face_modes(&self, data: &[f64], b2: &Basis, b3: &Basis) -> Vec<f64> {
        let n = self.grid.n;
        let mut tmp = vec![0.0; n * n];
        let mut out = vec![0.0; n * n];
        sandwich(&b2.forward, data, &b3.forward, n, &mut tmp, &mut out);
        out
    }

    /// Solve `-Δf = rhs` with the given lateral parities (Odd means zero on
    /// the face, Even zero slope) and end conditions. A pure slope problem is
    /// solved up to a constant, fixed by zero mean, after removing the
    /// incompatible part of the data, which is reported in `imbalance`.
    pub fn solve(
        &self,
        rhs: &[f64],
        lateral: [Parity; 2],
        inflow: EndCondition,
        outflow: EndCondition,
    ) -> PoissonSolution {
        let g = self.grid;
        let n = g.n;
        let h = g.dx();
        let (b2, b3) = (self.basis(lateral[0]), self.basis(lateral[1]));
        let modes_ok = |m2: usize, m3: usize| {
            let ok = |p: Parity, m: usize| p != Parity::Odd || (1..n - 1).contains(&m);
            ok(lateral[0], m2) && ok(lateral[1], m3)
        };
        // transform the right-hand side plane by plane
        let mut hat = vec![0.0; g.len()];
        let mut tmp = vec![0.0; n * n];
        let mut out = vec![0.0; n * n];
        for i1 in 0..n {
            let plane = &rhs[i1 * n * n..(i1 + 1) * n * n];
            sandwich(&b2.forward, plane, &b3.forward, n, &mut tmp, &mut out);
            hat[i1 * n * n..(i1 + 1) * n * n].copy_from_slice(&out);
        }
        let end_modes = |c: EndCondition| -> (bool, Vec<f64>) {
            match c {
                EndCondition::Value(d) => (false, self.face_modes(d, b2, b3)),
                EndCondition::Slope(d) => (true, self.face_modes(d, b2, b3)),
                EndCondition::ZeroValue => (false, vec![0.0; n * n]),
                EndCondition::ZeroSlope => (true, vec![0.0; n * n]),
            }
        };
        let (slope_in, g_in) = end_modes(inflow);
        let (slope_out, g_out) = end_modes(outflow);
        let h2 = h * h;
        let mut imbalance = 0.0;
        let mut sol_hat = vec![0.0; g.len()];
        let mut line = vec![0.0; n];
        let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for m2 in 0..n {
            for m3 in 0..n {
                if !modes_ok(m2, m3) {
                    continue;
                }
                let lam = b2.eig[m2] + b3.eig[m3];
                let k = m2 * n + m3;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = -hat[j * n * n + k];
                }
                // rows: (f_{j+1} - 2 f_j + f_{j-1}) / h^2 + lam f_j = line_j
                for j in 0..n {
                    sub[j] = 1.0 / h2;
                    sup[j] = 1.0 / h2;
                    diag[j] = -2.0 / h2 + lam;
                }
                if slope_in {
                    sup[0] = 2.0 / h2;
                    line[0] += 2.0 * g_in[k] / h;
                } else {
                    sub[0] = 0.0;
                    sup[0] = 0.0;
                    diag[0] = 1.0;
                    line[0] = g_in[k];
                }
                if slope_out {
                    sub[n - 1] = 2.0 / h2;
                    line[n - 1] -= 2.0 * g_out[k] / h;
                } else {
                    sub[n - 1] = 0.0;
                    sup[n - 1] = 0.0;
                    diag[n - 1] = 1.0;
                    line[n - 1] = g_out[k];
                }
                let singular = slope_in && slope_out && lam == 0.0;
                if singular {
                    // the trapezoid weight is a left null vector: remove the
                    // incompatible constant, then pin f_0 = 0
                    let w = |j: usize| if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    let wsum: f64 = (0..n).map(w).sum();
                    let dot: f64 = (0..n).map(|j| w(j) * line[j]).sum();
                    // the zero mode coefficient is the mean over a face of area 4
                    imbalance = 4.0 * h * dot;
                    line.iter_mut().for_each(|l| *l -= dot / wsum);
                    sup[0] = 0.0;
                    diag[0] = 1.0;
                    line[0] = 0.0;
                }
                thomas(&sub, &diag, &sup, &mut line);
                if singular {
                    let w = |j: usize| if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    let wsum: f64 = (0..n).map(w).sum();
                    let mean: f64 = (0..n).map(|j| w(j) * line[j]).sum::<f64>() / wsum;
                    line.iter_mut().for_each(|v| *v -= mean);
                }
                for j in 0..n {
                    sol_hat[j * n * n + k] = line[j];
                }
            }
        }
        let mut field = vec![0.0; g.len()];
        for i1 in 0..n {
            let plane = &sol_hat[i1 * n * n..(i1 + 1) * n * n];
            sandwich(&b2.inverse, plane, &b3.inverse, n, &mut tmp, &mut out);
            field[i1 * n * n..(i1 + 1) * n * n].copy_from_slice(&out);
        }
        // odd directions vanish on their faces exactly
        for (d, p) in lateral.iter().enumerate() {
            if *p == Parity::Odd {
                for idx in 0..g.len() {
                    let i = g.indices(idx)[d + 1];
                    if i == 0 || i == n - 1 {
                        field[idx] = 0.0;
                    }
                }
            }
        }
        PoissonSolution { field, imbalance }
    }
}

/// The discrete Laplacian matching the solver's boundary treatment, with
/// ghost values from the end conditions. Used to check residuals.
pub fn laplacian(grid: &Grid3, f: &[f64], lateral: [Parity; 2], inflow: EndCondition, outflow: EndCondition) -> Vec<f64> {
    let n = grid.n;
    let h2 = grid.dx() * grid.dx();
    let h = grid.dx();
    let mut out = vec![0.0; grid.len()];
    let face = |c: EndCondition, a: usize, b: usize| match c {
        EndCondition::Value(d) | EndCondition::Slope(d) => d[a * n + b],
        _ => 0.0,
    };
    for idx in 0..grid.len() {
        let [i1, i2, i3] = grid.indices(idx);
        let mut acc = 0.0;
        // x1
        let s = grid.stride(0);
        acc += if i1 > 0 && i1 < n - 1 {
            (f[idx + s] - 2.0 * f[idx] + f[idx - s]) / h2
        } else if i1 == 0 {
            match inflow {
                EndCondition::Slope(_) | EndCondition::ZeroSlope => {
                    (2.0 * f[idx + s] - 2.0 * f[idx] - 2.0 * h * face(inflow, i2, i3)) / h2
                }
                _ => 0.0,
            }
        } else {
            match outflow {
                EndCondition::Slope(_) | EndCondition::ZeroSlope => {
                    (2.0 * f[idx - s] - 2.0 * f[idx] + 2.0 * h * face(outflow, i2, i3)) / h2
                }
                _ => 0.0,
            }
        };
        for (d, p) in lateral.iter().enumerate() {
            let axis = d + 1;
            let s = grid.stride(axis);
            let i = grid.indices(idx)[axis];
            acc += if i > 0 && i < n - 1 {
                (f[idx + s] - 2.0 * f[idx] + f[idx - s]) / h2
            } else {
                match p {
                    Parity::Odd => 0.0,
                    _ => {
                        let inner = if i == 0 { f[idx + s] } else { f[idx - s] };
                        2.0 * (inner - f[idx]) / h2
                    }
                }
            };
        }
        out[idx] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn solves_discrete_problem_exactly() {
        let g = Grid3::new(9);
        let solver = PoissonSolver::new(g);
        let n = g.n;
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                (x[0] + 0.3).exp() * (PI * x[1]).sin() * (PI * x[2]).cos()
            })
            .collect();
        let lateral = [Parity::Odd, Parity::Even];
        let face_in: Vec<f64> = (0..n * n).map(|k| f[k]).collect();
        let slope_out: Vec<f64> = (0..n * n).map(|k| 0.1 * k as f64).collect();
        let lap = laplacian(&g, &f, lateral, EndCondition::Value(&face_in), EndCondition::Slope(&slope_out));
        // rhs from the discrete operator applied to f; slope data enters the ghost
        let rhs: Vec<f64> = lap.iter().map(|v| -v).collect();
        let sol = solver.solve(&rhs, lateral, EndCondition::Value(&face_in), EndCondition::Slope(&slope_out));
        for idx in 0..g.len() {
            let [_, i2, _] = g.indices(idx);
            if i2 == 0 || i2 == n - 1 {
                continue;
            }
            assert!((sol.field[idx] - f[idx]).abs() < 1e-10, "{} vs {}", sol.field[idx], f[idx]);
        }
    }

    #[test]
    fn pure_neumann_reports_imbalance() {
        let g = Grid3::new(9);
        let solver = PoissonSolver::new(g);
        let n = g.n;
        let ones = vec![1.0; n * n];
        let zeros = vec![0.0; n * n];
        let rhs = vec![0.0; g.len()];
        let sol =
            solver.solve(&rhs, [Parity::Even, Parity::Even], EndCondition::Slope(&ones), EndCondition::Slope(&zeros));
        // one unit of slope on the inflow face, nothing leaves
        assert!((sol.imbalance.abs() - 4.0).abs() < 1e-10, "{}", sol.imbalance);
        let bal = solver.solve(&rhs, [Parity::Even, Parity::Even], EndCondition::Slope(&ones), EndCondition::Slope(&ones));
        assert!(bal.imbalance.abs() < 1e-10);
        // f = x1 + const, zero mean
        for idx in 0..g.len() {
            assert!((bal.field[idx] - g.point(idx)[0]).abs() < 1e-10);
        }
    }
}
