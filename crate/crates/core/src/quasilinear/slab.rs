//! Time-space sample slabs and their mollification.

use crate::field::Grid1D;

/// Samples of an `ncomp`-vector field on `{k dt} x grid`, `k = 0..nt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    pub grid: Grid1D,
    pub nt: usize,
    pub dt: f64,
    pub ncomp: usize,
    pub data: Vec<f64>,
}

impl Slab {
    pub fn zeros(grid: Grid1D, nt: usize, dt: f64, ncomp: usize) -> Self {
        Self { grid, nt, dt, ncomp, data: vec![0.0; nt * grid.n * ncomp] }
    }

    pub fn nx(&self) -> usize {
        self.grid.n
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.nt - 1)
    }

    #[inline]
    pub fn idx(&self, k: usize, j: usize, c: usize) -> usize {
        (k * self.grid.n + j) * self.ncomp + c
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize, c: usize) -> f64 {
        self.data[self.idx(k, j, c)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, j: usize, c: usize, v: f64) {
        let i = self.idx(k, j, c);
        self.data[i] = v;
    }

    /// The `ncomp` values at one node.
    pub fn node(&self, k: usize, j: usize) -> &[f64] {
        let i = self.idx(k, j, 0);
        &self.data[i..i + self.ncomp]
    }

    pub fn node_mut(&mut self, k: usize, j: usize) -> &mut [f64] {
        let i = self.idx(k, j, 0);
        let n = self.ncomp;
        &mut self.data[i..i + n]
    }

    /// Linear in time, cubic Lagrange in space. Times outside the slab and
    /// points outside `[-1, 1]` are clamped.
    #[inline]
    pub fn interp(&self, c: usize, t: f64, x: f64) -> f64 {
        let nx = self.grid.n;
        let s = (t / self.dt).clamp(0.0, (self.nt - 1) as f64);
        let k0 = (s.floor() as usize).min(self.nt.saturating_sub(2));
        let th = s - k0 as f64;
        let (j0, w) = cubic_weights(nx, self.grid.dx(), x);
        let mut a = 0.0;
        let mut b = 0.0;
        for (m, wm) in w.iter().enumerate() {
            a += wm * self.get(k0, j0 + m, c);
            if self.nt > 1 {
                b += wm * self.get(k0 + 1, j0 + m, c);
            }
        }
        if self.nt > 1 {
            (1.0 - th) * a + th * b
        } else {
            a
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self - other|`.
    pub fn sup_diff(&self, other: &Slab) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Centered difference in time (second-order one-sided at the ends).
    pub fn time_derivative(&self) -> Slab {
        let mut out = Slab::zeros(self.grid, self.nt, self.dt, self.ncomp);
        if self.nt < 3 {
            return out;
        }
        let last = self.nt - 1;
        for k in 0..self.nt {
            for j in 0..self.nx() {
                for c in 0..self.ncomp {
                    let d = if k == 0 {
                        (-3.0 * self.get(0, j, c) + 4.0 * self.get(1, j, c) - self.get(2, j, c)) / (2.0 * self.dt)
                    } else if k == last {
                        (3.0 * self.get(last, j, c) - 4.0 * self.get(last - 1, j, c) + self.get(last - 2, j, c))
                            / (2.0 * self.dt)
                    } else {
                        (self.get(k + 1, j, c) - self.get(k - 1, j, c)) / (2.0 * self.dt)
                    };
                    out.set(k, j, c, d);
                }
            }
        }
        out
    }

    /// Centered difference in space (second-order one-sided at the ends).
    pub fn space_derivative(&self) -> Slab {
        let mut out = Slab::zeros(self.grid, self.nt, self.dt, self.ncomp);
        let dx = self.grid.dx();
        let last = self.nx() - 1;
        for k in 0..self.nt {
            for j in 0..=last {
                for c in 0..self.ncomp {
                    let d = if last < 2 {
                        (self.get(k, last, c) - self.get(k, 0, c)) / (last as f64 * dx)
                    } else if j == 0 {
                        (-3.0 * self.get(k, 0, c) + 4.0 * self.get(k, 1, c) - self.get(k, 2, c)) / (2.0 * dx)
                    } else if j == last {
                        (3.0 * self.get(k, last, c) - 4.0 * self.get(k, last - 1, c) + self.get(k, last - 2, c))
                            / (2.0 * dx)
                    } else {
                        (self.get(k, j + 1, c) - self.get(k, j - 1, c)) / (2.0 * dx)
                    };
                    out.set(k, j, c, d);
                }
            }
        }
        out
    }
}

/// Stencil start and weights of 4-point Lagrange interpolation at `x`,
/// shifted inward near the ends. Falls back to linear weights on grids with
/// fewer than four nodes.
#[inline]
pub fn cubic_weights(nx: usize, dx: f64, x: f64) -> (usize, [f64; 4]) {
    let s = ((x + 1.0) / dx).clamp(0.0, (nx - 1) as f64);
    if nx < 4 {
        let j0 = (s.floor() as usize).min(nx - 2);
        let th = s - j0 as f64;
        return (j0, [1.0 - th, th, 0.0, 0.0]);
    }
    let base = (s.floor() as isize - 1).clamp(0, nx as isize - 4) as usize;
    let u = s - base as f64; // position within the stencil, nodes at 0..3
    let w = [
        -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
        u * (u - 2.0) * (u - 3.0) / 2.0,
        -u * (u - 1.0) * (u - 3.0) / 2.0,
        u * (u - 1.0) * (u - 2.0) / 6.0,
    ];
    (base, w)
}

/// Normalized samples of the bump `exp(-1/(1 - s^2))` at offsets `m h`,
/// `|m h| < radius`. Returns `[1]` when the radius is below one spacing.
pub fn bump_weights(radius: f64, h: f64) -> Vec<f64> {
    let m = (radius / h).ceil() as isize;
    let mut w: Vec<f64> = (-m..=m)
        .map(|i| {
            let s = i as f64 * h / radius;
            if s.abs() < 1.0 {
                (-1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return vec![1.0];
    }
    w.iter_mut().for_each(|v| *v /= total);
    // trim zero tails
    while w.len() > 1 && w[0] == 0.0 && w[w.len() - 1] == 0.0 {
        w.remove(0);
        w.pop();
    }
    w
}

/// Convolution with a tensor-product bump of radius `1/level` in `(t, x)`.
/// The field is extended by constants for `t < 0`, beyond the last sample
/// time and beyond `x = +-1`.
pub fn mollify(slab: &Slab, level: usize) -> Slab {
    let r = 1.0 / level.max(1) as f64;
    let wt = bump_weights(r, slab.dt);
    let wx = bump_weights(r, slab.grid.dx());
    let (nt, nx, nc) = (slab.nt as isize, slab.nx() as isize, slab.ncomp);
    let ht = (wt.len() / 2) as isize;
    let hx = (wx.len() / 2) as isize;
    let mut tmp = Slab::zeros(slab.grid, slab.nt, slab.dt, nc);
    for k in 0..nt {
        for j in 0..nx {
            for c in 0..nc {
                let mut acc = 0.0;
                for (m, w) in wt.iter().enumerate() {
                    let kk = (k + m as isize - ht).clamp(0, nt - 1) as usize;
                    acc += w * slab.get(kk, j as usize, c);
                }
                tmp.set(k as usize, j as usize, c, acc);
            }
        }
    }
    let mut out = Slab::zeros(slab.grid, slab.nt, slab.dt, nc);
    for k in 0..nt {
        for j in 0..nx {
            for c in 0..nc {
                let mut acc = 0.0;
                for (m, w) in wx.iter().enumerate() {
                    let jj = (j + m as isize - hx).clamp(0, nx - 1) as usize;
                    acc += w * tmp.get(k as usize, jj, c);
                }
                out.set(k as usize, j as usize, c, acc);
            }
        }
    }
    out
}
