//! Uniform grids on `[-1, 1]` and sampled scalar fields with the norms used
//! throughout the crate.

/// Node-centered uniform grid with `n >= 2` nodes including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    pub n: usize,
}

impl Grid1D {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two nodes");
        Self { n }
    }

    pub fn dx(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }
}

/// Exponential weight `exp(-alpha * sign * x)`, which decays in the
/// direction of transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub alpha: f64,
    pub lambda_m: f64,
}

impl WeightParams {
    pub fn weight(&self, x: f64, sign: f64) -> f64 {
        (-self.alpha * sign * x).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField1D {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl ScalarField1D {
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, values: grid.nodes().into_iter().map(f).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn weighted_sup(&self, w: &WeightParams, sign: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .fold(0.0, |m, (j, v)| m.max(w.weight(self.grid.x(j), sign) * v.abs()))
    }

    /// Largest difference quotient between neighbouring nodes.
    pub fn lipschitz_seminorm(&self) -> f64 {
        let dx = self.grid.dx();
        self.values.windows(2).fold(0.0, |m, w| m.max((w[1] - w[0]).abs() / dx))
    }

    /// `sup |f| + sup |f'|`, with the derivative from neighbour differences.
    pub fn w1inf_norm(&self) -> f64 {
        self.sup_norm() + self.lipschitz_seminorm()
    }

    pub fn left(&self) -> f64 {
        self.values[0]
    }

    pub fn right(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_linear_ramp() {
        let f = ScalarField1D::from_fn(Grid1D::new(11), |x| 2.0 * x);
        assert!((f.sup_norm() - 2.0).abs() < 1e-15);
        assert!((f.lipschitz_seminorm() - 2.0).abs() < 1e-12);
        assert_eq!(f.left(), -2.0);
        let w = WeightParams { alpha: 1.0, lambda_m: 1.0 };
        // sup of 2|x| e^{-x} on the nodes is at x = -1
        assert!((f.weighted_sup(&w, 1.0) - 2.0 * 1f64.exp()).abs() < 1e-12);
    }
}
