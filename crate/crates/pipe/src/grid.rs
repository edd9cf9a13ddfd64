//! Node-centred grids on the pipe `(-1,1)^3`, sampled fields and the
//! second-order difference operators used by every solver in the crate.
//!
//! The lateral faces `x2 = ±1` and `x3 = ±1` are handled by reflection: each
//! component carries a parity per lateral direction, and differences at a
//! face use the ghost value the reflection prescribes. The inflow and
//! outflow faces `x1 = ±1` use one-sided second-order stencils.

/// Uniform grid with `n` nodes per direction, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid3 {
    pub n: usize,
}

impl Grid3 {
    pub fn new(n: usize) -> Self {
        assert!(n >= 4, "grid needs at least four nodes per direction");
        Self { n }
    }

    pub fn dx(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.dx()
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.indices(idx);
        [self.x(a), self.x(b), self.x(c)]
    }

    /// Stride of the flat index along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.n * self.n,
            1 => self.n,
            _ => 1,
        }
    }

    /// Quadrature weight of a node for the composite trapezoid rule.
    pub fn weight(&self, idx: usize) -> f64 {
        let h = self.dx();
        self.indices(idx).iter().fold(1.0, |w, &i| w * if i == 0 || i == self.n - 1 { 0.5 * h } else { h })
    }

    /// Trapezoid weight of node `(i, j)` on a face.
    pub fn face_weight(&self, i: usize, j: usize) -> f64 {
        let h = self.dx();
        let one = |k: usize| if k == 0 || k == self.n - 1 { 0.5 * h } else { h };
        one(i) * one(j)
    }

    /// Nodes on the lateral boundary with their outward normals. Edge nodes
    /// appear once per face they belong to.
    pub fn lateral_nodes(&self) -> Vec<(usize, [f64; 3])> {
        let n = self.n;
        let mut out = Vec::with_capacity(4 * n * n);
        for i1 in 0..n {
            for k in 0..n {
                out.push((self.idx(i1, 0, k), [0.0, -1.0, 0.0]));
                out.push((self.idx(i1, n - 1, k), [0.0, 1.0, 0.0]));
                out.push((self.idx(i1, k, 0), [0.0, 0.0, -1.0]));
                out.push((self.idx(i1, k, n - 1), [0.0, 0.0, 1.0]));
            }
        }
        out
    }
}

/// How a component behaves under reflection across a pair of faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// No reflection; one-sided differences.
    Free,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Free => Parity::Free,
        }
    }
}

/// Parity of one component along each axis. Axis 0 is always `Free`.
pub type Parities = [Parity; 3];

pub const SCALAR_EVEN: Parities = [Parity::Free, Parity::Even, Parity::Even];

/// Velocities reflect as polar vectors and vorticities as axial vectors: the
/// normal velocity is odd across a face while the normal vorticity is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Polar,
    Axial,
}

impl VectorKind {
    pub fn parities(self, comp: usize) -> Parities {
        let normal_odd = |axis: usize| {
            let normal = comp == axis;
            match (self, normal) {
                (VectorKind::Polar, true) | (VectorKind::Axial, false) => Parity::Odd,
                _ => Parity::Even,
            }
        };
        [Parity::Free, normal_odd(1), normal_odd(2)]
    }

    pub fn dual(self) -> Self {
        match self {
            VectorKind::Polar => VectorKind::Axial,
            VectorKind::Axial => VectorKind::Polar,
        }
    }
}

fn with_flip(p: Parities, axis: usize) -> Parities {
    let mut q = p;
    q[axis] = q[axis].flip();
    q
}

/// First difference along `axis`.
pub fn derivative(grid: &Grid3, f: &[f64], axis: usize, parity: Parities) -> Vec<f64> {
    let n = grid.n;
    let s = grid.stride(axis);
    let h = grid.dx();
    let mut out = vec![0.0; f.len()];
    for idx in 0..f.len() {
        let i = grid.indices(idx)[axis];
        out[idx] = if i > 0 && i < n - 1 {
            (f[idx + s] - f[idx - s]) / (2.0 * h)
        } else if i == 0 {
            match parity[axis] {
                Parity::Free => (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) / (2.0 * h),
                Parity::Even => 0.0,
                Parity::Odd => (f[idx + s] - f[idx]) / h,
            }
        } else {
            match parity[axis] {
                Parity::Free => (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) / (2.0 * h),
                Parity::Even => 0.0,
                Parity::Odd => (f[idx] - f[idx - s]) / h,
            }
        };
    }
    out
}

/// Second difference along `axis`.
pub fn second_derivative(grid: &Grid3, f: &[f64], axis: usize, parity: Parities) -> Vec<f64> {
    let n = grid.n;
    let s = grid.stride(axis);
    let h2 = grid.dx() * grid.dx();
    let mut out = vec![0.0; f.len()];
    for idx in 0..f.len() {
        let i = grid.indices(idx)[axis];
        out[idx] = if i > 0 && i < n - 1 {
            (f[idx + s] - 2.0 * f[idx] + f[idx - s]) / h2
        } else {
            let inward = |k: usize| if i == 0 { f[idx + k * s] } else { f[idx - k * s] };
            match parity[axis] {
                Parity::Free => (2.0 * inward(0) - 5.0 * inward(1) + 4.0 * inward(2) - inward(3)) / h2,
                Parity::Even => 2.0 * (inward(1) - inward(0)) / h2,
                // the reflected ghost makes the stencil vanish identically
                Parity::Odd => 0.0,
            }
        };
    }
    out
}

/// `d^2 f / dx_a dx_b`, the pure case falling back to `second_derivative`.
pub fn mixed_derivative(grid: &Grid3, f: &[f64], a: usize, b: usize, parity: Parities) -> Vec<f64> {
    if a == b {
        return second_derivative(grid, f, a, parity);
    }
    let first = derivative(grid, f, a, parity);
    derivative(grid, &first, b, with_flip(parity, a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    pub grid: Grid3,
    pub data: Vec<f64>,
}

impl ScalarField3 {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self { grid, data: (0..grid.len()).map(|i| f(grid.point(i))).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        sup_abs(&self.data)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.grid, &self.data, p)
    }

    pub fn gradient(&self, parity: Parities) -> VectorField3 {
        let parts: Vec<Vec<f64>> = (0..3).map(|a| derivative(&self.grid, &self.data, a, parity)).collect();
        VectorField3::from_components(self.grid, [&parts[0], &parts[1], &parts[2]])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub grid: Grid3,
    pub data: Vec<[f64; 3]>,
}

impl VectorField3 {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, data: vec![[0.0; 3]; grid.len()] }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self { grid, data: (0..grid.len()).map(|i| f(grid.point(i))).collect() }
    }

    pub fn from_components(grid: Grid3, c: [&[f64]; 3]) -> Self {
        Self { grid, data: (0..grid.len()).map(|i| [c[0][i], c[1][i], c[2][i]]).collect() }
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|v| v[c]).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()).max(v[2].abs()))
    }

    /// `(sum_c ||v_c||_p^p)^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = (0..3).map(|c| lp_norm(&self.grid, &self.component(c), p).powf(p)).sum();
        s.powf(1.0 / p)
    }

    pub fn sup_diff(&self, other: &VectorField3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| (0..3).fold(m, |m, c| m.max((a[c] - b[c]).abs())))
    }

    pub fn sub(&self, other: &VectorField3) -> VectorField3 {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]]).collect();
        VectorField3 { grid: self.grid, data }
    }

    pub fn add(&self, other: &VectorField3) -> VectorField3 {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]).collect();
        VectorField3 { grid: self.grid, data }
    }

    pub fn scale(&self, s: f64) -> VectorField3 {
        VectorField3 { grid: self.grid, data: self.data.iter().map(|a| [s * a[0], s * a[1], s * a[2]]).collect() }
    }

    /// `J[i][j] = d v_i / d x_j` per node.
    pub fn jacobian(&self, kind: VectorKind) -> Vec<[[f64; 3]; 3]> {
        let mut out = vec![[[0.0; 3]; 3]; self.grid.len()];
        for i in 0..3 {
            let comp = self.component(i);
            for j in 0..3 {
                let d = derivative(&self.grid, &comp, j, kind.parities(i));
                for (o, v) in out.iter_mut().zip(d) {
                    o[i][j] = v;
                }
            }
        }
        out
    }

    pub fn divergence(&self, kind: VectorKind) -> ScalarField3 {
        let mut data = vec![0.0; self.grid.len()];
        for c in 0..3 {
            let d = derivative(&self.grid, &self.component(c), c, kind.parities(c));
            data.iter_mut().zip(d).for_each(|(a, b)| *a += b);
        }
        ScalarField3 { grid: self.grid, data }
    }

    pub fn curl(&self, kind: VectorKind) -> VectorField3 {
        let g = self.grid;
        let d = |c: usize, a: usize| derivative(&g, &self.component(c), a, kind.parities(c));
        let (d23, d32) = (d(2, 1), d(1, 2));
        let (d31, d13) = (d(0, 2), d(2, 0));
        let (d12, d21) = (d(1, 0), d(0, 1));
        let data = (0..g.len()).map(|i| [d23[i] - d32[i], d31[i] - d13[i], d12[i] - d21[i]]).collect();
        VectorField3 { grid: g, data }
    }

    /// Sobolev norm `(sum_c sum_{|a| <= order} ||d^a v_c||_p^p)^(1/p)`.
    pub fn sobolev_norm(&self, kind: VectorKind, order: usize, p: f64) -> f64 {
        let comps: Vec<(Vec<f64>, Parities)> = (0..3).map(|c| (self.component(c), kind.parities(c))).collect();
        sobolev_norm(&self.grid, &comps, order, p)
    }

    /// `max |v x nu|` over the lateral boundary.
    pub fn lateral_tangential_sup(&self) -> f64 {
        self.grid.lateral_nodes().iter().fold(0.0f64, |m, (idx, nu)| m.max(norm3(cross(self.data[*idx], *nu))))
    }

    /// `max |v . nu|` over the lateral boundary.
    pub fn lateral_normal_sup(&self) -> f64 {
        self.grid.lateral_nodes().iter().fold(0.0f64, |m, (idx, nu)| m.max(dot(self.data[*idx], *nu).abs()))
    }
}

pub fn sup_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Trapezoid-rule `L^p` norm over the pipe.
pub fn lp_norm(grid: &Grid3, f: &[f64], p: f64) -> f64 {
    let s: f64 = f.iter().enumerate().map(|(i, v)| grid.weight(i) * v.abs().powf(p)).sum();
    s.powf(1.0 / p)
}

/// Sobolev norm of a list of components with their parities, derivatives up
/// to second order.
pub fn sobolev_norm(grid: &Grid3, comps: &[(Vec<f64>, Parities)], order: usize, p: f64) -> f64 {
    assert!(order <= 2, "only orders up to two are supported");
    let mut total = 0.0;
    for (f, par) in comps {
        total += lp_norm(grid, f, p).powf(p);
        if order >= 1 {
            for a in 0..3 {
                total += lp_norm(grid, &derivative(grid, f, a, *par), p).powf(p);
            }
        }
        if order >= 2 {
            for a in 0..3 {
                for b in a..3 {
                    let m = if a == b { 1.0 } else { 2.0 };
                    total += m * lp_norm(grid, &mixed_derivative(grid, f, a, b, *par), p).powf(p);
                }
            }
        }
    }
    total.powf(1.0 / p)
}

#[inline]
pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm3(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn indices_roundtrip() {
        let g = Grid3::new(5);
        for idx in 0..g.len() {
            let [a, b, c] = g.indices(idx);
            assert_eq!(g.idx(a, b, c), idx);
        }
        let total: f64 = (0..g.len()).map(|i| g.weight(i)).sum();
        assert!((total - 8.0).abs() < 1e-12);
    }

    #[test]
    fn parity_table() {
        use Parity::*;
        assert_eq!(VectorKind::Polar.parities(0), [Free, Even, Even]);
        assert_eq!(VectorKind::Polar.parities(1), [Free, Odd, Even]);
        assert_eq!(VectorKind::Axial.parities(1), [Free, Even, Odd]);
        assert_eq!(VectorKind::Axial.parities(2), [Free, Odd, Even]);
    }

    #[test]
    fn differences_are_second_order() {
        let mut errs = vec![];
        for n in [17, 33] {
            let g = Grid3::new(n);
            // even in x2, odd in x3, free in x1
            let f = ScalarField3::from_fn(g, |x| (x[0]).exp() * (PI * x[1]).cos() * (PI * x[2]).sin());
            let par = [Parity::Free, Parity::Even, Parity::Odd];
            let d3 = derivative(&g, &f.data, 2, par);
            let d1 = second_derivative(&g, &f.data, 0, par);
            let e3 = (0..g.len())
                .map(|i| {
                    let x = g.point(i);
                    (d3[i] - PI * x[0].exp() * (PI * x[1]).cos() * (PI * x[2]).cos()).abs()
                })
                .fold(0.0, f64::max);
            let e1 = (0..g.len()).map(|i| (d1[i] - f.data[i]).abs()).fold(0.0, f64::max);
            errs.push((e3, e1));
        }
        assert!(errs[0].0 / errs[1].0 > 3.5);
        assert!(errs[0].1 / errs[1].1 > 3.5);
    }
}
