//! Time slabs of vector fields on uniform time levels and the spatial
//! interpolation used at the feet of characteristics.

use crate::grid::{Grid3, Parities, Parity, VectorField3, VectorKind};

/// A vector field at the levels `t_k = k dt`, `k = 0..levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSlab {
    pub grid: Grid3,
    pub dt: f64,
    pub levels: usize,
    pub data: Vec<[f64; 3]>,
}

impl VectorSlab {
    pub fn zeros(grid: Grid3, dt: f64, levels: usize) -> Self {
        Self { grid, dt, levels, data: vec![[0.0; 3]; grid.len() * levels] }
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.levels).map(|k| self.time(k)).collect()
    }

    pub fn level(&self, k: usize) -> &[[f64; 3]] {
        let m = self.grid.len();
        &self.data[k * m..(k + 1) * m]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [[f64; 3]] {
        let m = self.grid.len();
        &mut self.data[k * m..(k + 1) * m]
    }

    pub fn field(&self, k: usize) -> VectorField3 {
        VectorField3 { grid: self.grid, data: self.level(k).to_vec() }
    }

    pub fn set_level(&mut self, k: usize, f: &VectorField3) {
        self.level_mut(k).copy_from_slice(&f.data);
    }

    /// `sup_k ||a(t_k) - b(t_k)||_p`.
    pub fn sup_lp_distance(&self, other: &VectorSlab, p: f64) -> f64 {
        (0..self.levels).map(|k| lp_level(&self.grid, self.level(k), Some(other.level(k)), p)).fold(0.0, f64::max)
    }

    /// `sup_k ||a(t_k)||_p`.
    pub fn sup_lp(&self, p: f64) -> f64 {
        (0..self.levels).map(|k| lp_level(&self.grid, self.level(k), None, p)).fold(0.0, f64::max)
    }
}

fn lp_level(grid: &Grid3, a: &[[f64; 3]], b: Option<&[[f64; 3]]>, p: f64) -> f64 {
    let mut s = 0.0;
    for (idx, x) in a.iter().enumerate() {
        let y = b.map_or([0.0; 3], |b| b[idx]);
        let m = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
        s += grid.weight(idx) * m.powf(p);
    }
    s.powf(1.0 / p)
}

/// Interpolation stencil along one axis.
#[derive(Debug, Clone, Copy)]
struct Stencil<const K: usize> {
    idx: [usize; K],
    w: [f64; K],
    /// Set where the node is the mirror image of a ghost across a face.
    mirrored: [bool; K],
}

fn lagrange4(z: f64) -> [f64; 4] {
    // nodes at 0, 1, 2, 3
    [
        -(z - 1.0) * (z - 2.0) * (z - 3.0) / 6.0,
        z * (z - 2.0) * (z - 3.0) / 2.0,
        -z * (z - 1.0) * (z - 3.0) / 2.0,
        z * (z - 1.0) * (z - 2.0) / 6.0,
    ]
}

fn cubic_stencil(grid: &Grid3, s: f64, reflect: bool) -> Stencil<4> {
    let n = grid.n as isize;
    let q = ((s.clamp(-1.0, 1.0) + 1.0) / grid.dx()).clamp(0.0, (n - 1) as f64);
    let i0 = (q.floor() as isize).min(n - 2);
    let base = if reflect { i0 - 1 } else { (i0 - 1).clamp(0, n - 4) };
    let w = lagrange4(q - base as f64);
    let mut idx = [0usize; 4];
    let mut mirrored = [false; 4];
    for k in 0..4 {
        let j = base + k as isize;
        let (r, m) = if j < 0 {
            (-j, true)
        } else if j > n - 1 {
            (2 * (n - 1) - j, true)
        } else {
            (j, false)
        };
        idx[k] = r as usize;
        mirrored[k] = m;
    }
    Stencil { idx, w, mirrored }
}

fn linear_stencil(grid: &Grid3, s: f64) -> Stencil<2> {
    let n = grid.n;
    let q = ((s.clamp(-1.0, 1.0) + 1.0) / grid.dx()).clamp(0.0, (n - 1) as f64);
    let i0 = (q.floor() as usize).min(n - 2);
    let r = q - i0 as f64;
    Stencil { idx: [i0, i0 + 1], w: [1.0 - r, r], mirrored: [false; 2] }
}

/// Tricubic Lagrange interpolation of a vector field. Across the lateral
/// faces the stencil reaches into reflected ghost nodes with the sign each
/// component's parity prescribes; along `x1` the stencil is shifted inward.
#[derive(Debug, Clone, Copy)]
pub struct Tricubic {
    grid: Grid3,
    par: [Parities; 3],
}

impl Tricubic {
    pub fn new(grid: Grid3, kind: VectorKind) -> Self {
        Self { grid, par: [kind.parities(0), kind.parities(1), kind.parities(2)] }
    }

    pub fn eval(&self, f: &[[f64; 3]], x: [f64; 3]) -> [f64; 3] {
        let g = &self.grid;
        let s1 = cubic_stencil(g, x[0], false);
        let s2 = cubic_stencil(g, x[1], true);
        let s3 = cubic_stencil(g, x[2], true);
        let (st1, st2) = (g.stride(0), g.stride(1));
        let mut out = [0.0; 3];
        for b in 0..4 {
            for c in 0..4 {
                let w23 = s2.w[b] * s3.w[c];
                let mut sign = [1.0; 3];
                for comp in 0..3 {
                    if s2.mirrored[b] && self.par[comp][1] == Parity::Odd {
                        sign[comp] = -sign[comp];
                    }
                    if s3.mirrored[c] && self.par[comp][2] == Parity::Odd {
                        sign[comp] = -sign[comp];
                    }
                }
                let off = s2.idx[b] * st2 + s3.idx[c];
                let mut acc = [0.0; 3];
                for a in 0..4 {
                    let v = f[s1.idx[a] * st1 + off];
                    let w = s1.w[a];
                    acc[0] += w * v[0];
                    acc[1] += w * v[1];
                    acc[2] += w * v[2];
                }
                for comp in 0..3 {
                    out[comp] += sign[comp] * w23 * acc[comp];
                }
            }
        }
        out
    }
}

/// Trilinear interpolation, clamped to the closed pipe.
pub fn trilinear(grid: &Grid3, f: &[[f64; 3]], x: [f64; 3]) -> [f64; 3] {
    let s1 = linear_stencil(grid, x[0]);
    let s2 = linear_stencil(grid, x[1]);
    let s3 = linear_stencil(grid, x[2]);
    let mut out = [0.0; 3];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let w = s1.w[a] * s2.w[b] * s3.w[c];
                let v = f[grid.idx(s1.idx[a], s2.idx[b], s3.idx[c])];
                out[0] += w * v[0];
                out[1] += w * v[1];
                out[2] += w * v[2];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tricubic_reproduces_cubics_and_parities() {
        let g = Grid3::new(9);
        let cubic = |x: [f64; 3]| {
            let p = |s: f64| 0.3 + s - 0.5 * s * s + 0.25 * s * s * s;
            p(x[0]) * (1.0 + x[1] * x[1]) * (1.0 - 0.5 * x[2] * x[2])
        };
        // the first axial component is odd across both lateral face pairs
        let f = VectorField3::from_fn(g, |x| {
            let s2 = (std::f64::consts::PI * x[1]).sin();
            let s3 = (std::f64::consts::PI * x[2]).sin();
            [cubic([x[0], 0.0, 0.0]) * s2 * s3, 0.0, 0.0]
        });
        let it = Tricubic::new(g, VectorKind::Axial);
        for &x in &[[-0.93, 0.97, -0.99], [0.41, -0.12, 0.33], [0.99, -0.999, 0.5]] {
            let v = it.eval(&f.data, x);
            let exact = cubic([x[0], 0.0, 0.0]) * (std::f64::consts::PI * x[1]).sin() * (std::f64::consts::PI * x[2]).sin();
            assert!((v[0] - exact).abs() < 2e-2, "{} vs {}", v[0], exact);
        }
        // nodes are reproduced exactly
        for idx in [0, 17, 300, g.len() - 1] {
            let v = it.eval(&f.data, g.point(idx));
            assert!((v[0] - f.data[idx][0]).abs() < 1e-14);
        }
        let lin = VectorField3::from_fn(g, |x| [x[0] - 2.0 * x[1] + 0.5 * x[2], 1.0, cubic(x)]);
        let v = trilinear(&g, &lin.data, [0.1, -0.33, 0.77]);
        assert!((v[0] - (0.1 + 0.66 + 0.385)).abs() < 1e-14);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slab_distances() {
        let g = Grid3::new(5);
        let mut a = VectorSlab::zeros(g, 0.5, 3);
        let b = a.clone();
        for v in a.level_mut(2) {
            *v = [0.0, 3.0, 4.0];
        }
        // volume 8, |v| = 5
        assert!((a.sup_lp_distance(&b, 2.0) - 5.0 * 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(a.times(), vec![0.0, 0.5, 1.0]);
    }
}
