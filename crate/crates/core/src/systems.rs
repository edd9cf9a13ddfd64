//! Flux catalog and eigen-decomposition of the flux Jacobian.
//!
//! A system `dt U + dx F(U) = 0` is linearized around a constant base state
//! `U_bar`; the perturbation `V = U - U_bar` then satisfies
//! `dt V + A(U_bar + V) dx V = 0` with `A = DF`. The decomposition
//! `A = T diag(lambda) T^{-1}` uses ascending eigenvalues and unit-norm
//! eigenvector columns whose first non-negligible entry is positive, so the
//! characteristic unknowns `f = T^{-1} V` are uniquely defined.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Default floor on `|lambda|`; smaller eigenvalues make the boundary
/// characteristic and are rejected.
pub const DEFAULT_LAMBDA_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum FluxKind {
    /// `F(U) = c U`.
    Advection { speed: f64 },
    /// `F(U) = U^2 / 2`.
    Burgers,
    /// Lagrangian gas dynamics, `U = (v, u)`, `F = (-u, p(v))`, `p = v^{-gamma}`.
    PSystem { gamma: f64 },
    /// `F(U) = M U` for a constant matrix.
    Linear { matrix: DMatrix<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxSystem {
    pub name: String,
    pub kind: FluxKind,
    /// Base state the problem is linearized around.
    pub base_state: Vec<f64>,
}

impl FluxSystem {
    pub fn advection(speed: f64) -> Self {
        Self { name: "advection".into(), kind: FluxKind::Advection { speed }, base_state: vec![0.0] }
    }

    pub fn burgers() -> Self {
        Self { name: "burgers".into(), kind: FluxKind::Burgers, base_state: vec![1.0] }
    }

    pub fn psystem() -> Self {
        Self { name: "psystem".into(), kind: FluxKind::PSystem { gamma: 2.0 }, base_state: vec![1.0, 0.0] }
    }

    /// The symmetric wave system with Jacobian `[[0, 1], [1, 0]]`.
    pub fn linear2() -> Self {
        Self::linear("linear2", DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), vec![0.0, 0.0])
    }

    pub fn linear(name: &str, matrix: DMatrix<f64>, base_state: Vec<f64>) -> Self {
        Self { name: name.into(), kind: FluxKind::Linear { matrix }, base_state }
    }

    /// Look up a catalog entry by name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "advection" => Ok(Self::advection(1.0)),
            "burgers" => Ok(Self::burgers()),
            "psystem" => Ok(Self::psystem()),
            "linear2" => Ok(Self::linear2()),
            other => Err(Error::InvalidProblem(format!("unknown system `{other}`"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.base_state.len()
    }

    fn check_state(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain { system: self.name.clone(), state: u.to_vec() });
        }
        if let FluxKind::PSystem { .. } = self.kind {
            if u[0] <= 0.0 {
                return Err(Error::Domain { system: self.name.clone(), state: u.to_vec() });
            }
        }
        Ok(())
    }

    pub fn flux(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_state(u)?;
        Ok(match &self.kind {
            FluxKind::Advection { speed } => vec![speed * u[0]],
            FluxKind::Burgers => vec![0.5 * u[0] * u[0]],
            FluxKind::PSystem { gamma } => vec![-u[1], u[0].powf(-gamma)],
            FluxKind::Linear { matrix } => (matrix * DVector::from_column_slice(u)).iter().copied().collect(),
        })
    }

    /// Analytic Jacobian `DF(u)`.
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        self.check_state(u)?;
        Ok(match &self.kind {
            FluxKind::Advection { speed } => DMatrix::from_element(1, 1, *speed),
            FluxKind::Burgers => DMatrix::from_element(1, 1, u[0]),
            FluxKind::PSystem { gamma } => {
                DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -gamma * u[0].powf(-gamma - 1.0), 0.0])
            }
            FluxKind::Linear { matrix } => matrix.clone(),
        })
    }

    /// Jacobian at `U_bar + v`.
    pub fn jacobian_at_perturbation(&self, v: &[f64]) -> Result<DMatrix<f64>> {
        let u: Vec<f64> = self.base_state.iter().zip(v).map(|(a, b)| a + b).collect();
        self.jacobian(&u)
    }
}

/// Largest entrywise gap between the analytic Jacobian and a centered
/// finite-difference Jacobian of the flux, relative to `max(1, |DF|)`.
pub fn jacobian_fd_check(system: &FluxSystem, state: &[f64]) -> Result<f64> {
    let exact = system.jacobian(state)?;
    let n = system.dim();
    let mut worst = 0.0f64;
    for j in 0..n {
        let h = 1e-6 * state[j].abs().max(1.0);
        let mut up = state.to_vec();
        let mut dn = state.to_vec();
        up[j] += h;
        dn[j] -= h;
        let fu = system.flux(&up)?;
        let fd = system.flux(&dn)?;
        for i in 0..n {
            let approx = (fu[i] - fd[i]) / (2.0 * h);
            worst = worst.max((approx - exact[(i, j)]).abs() / exact[(i, j)].abs().max(1.0));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Floor on `|lambda|`.
    pub lambda_floor: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { lambda_floor: DEFAULT_LAMBDA_FLOOR }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues.
    pub lambdas: Vec<f64>,
    /// Eigenvector columns.
    pub t: DMatrix<f64>,
    pub t_inv: DMatrix<f64>,
}

impl EigenDecomposition {
    /// `f = T^{-1} v`.
    pub fn to_characteristic(&self, v: &[f64]) -> Vec<f64> {
        (&self.t_inv * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// `v = T f`.
    pub fn from_characteristic(&self, f: &[f64]) -> Vec<f64> {
        (&self.t * DVector::from_column_slice(f)).iter().copied().collect()
    }

    /// `max |T diag(lambda) T^{-1} - A|`.
    pub fn reconstruction_error(&self, a: &DMatrix<f64>) -> f64 {
        let lam = DMatrix::from_diagonal(&DVector::from_column_slice(&self.lambdas));
        (&self.t * lam * &self.t_inv - a).amax()
    }
}

fn normalize_column(mut v: DVector<f64>) -> DVector<f64> {
    let norm = v.norm();
    v /= norm;
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        v = -v;
    }
    v
}

/// Eigen-decomposition of an arbitrary real matrix with real, distinct
/// eigenvalues.
pub fn decompose_matrix(a: &DMatrix<f64>, opts: &EigenOptions) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidProblem("jacobian must be square and non-empty".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Hyperbolicity("non-finite jacobian".into()));
    }
    let scale = a.amax().max(1.0);
    let (lambdas, cols): (Vec<f64>, Vec<DVector<f64>>) = match n {
        1 => (vec![a[(0, 0)]], vec![DVector::from_element(1, 1.0)]),
        2 => {
            let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            let half_tr = 0.5 * (p + s);
            let disc = 0.25 * (p - s).powi(2) + q * r;
            if disc <= (1e-12 * scale).powi(2) {
                return Err(Error::Hyperbolicity(format!("2x2 discriminant {disc:.3e} is not positive")));
            }
            let root = disc.sqrt();
            let lams = vec![half_tr - root, half_tr + root];
            let cols = lams
                .iter()
                .map(|&l| {
                    let c1 = DVector::from_column_slice(&[q, l - p]);
                    let c2 = DVector::from_column_slice(&[l - s, r]);
                    normalize_column(if c1.norm() >= c2.norm() { c1 } else { c2 })
                })
                .collect();
            (lams, cols)
        }
        _ => {
            // Francis QR through the real Schur form, then an SVD null vector.
            let eig = a.clone().complex_eigenvalues();
            let mut lams = Vec::with_capacity(n);
            for z in eig.iter() {
                if z.im.abs() > 1e-9 * scale {
                    return Err(Error::Hyperbolicity(format!("complex eigenvalue {z}")));
                }
                lams.push(z.re);
            }
            lams.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let cols = lams
                .iter()
                .map(|&l| {
                    let shifted = a - DMatrix::identity(n, n) * l;
                    let svd = shifted.svd(false, true);
                    let v_t = svd.v_t.expect("requested right singular vectors");
                    let (imin, _) = svd
                        .singular_values
                        .iter()
                        .enumerate()
                        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
                        .unwrap();
                    normalize_column(v_t.row(imin).transpose())
                })
                .collect();
            (lams, cols)
        }
    };
    for w in lambdas.windows(2) {
        if w[1] - w[0] <= 1e-10 * scale {
            return Err(Error::Hyperbolicity(format!("repeated eigenvalue near {:.6e}", w[0])));
        }
    }
    if let Some(&l) = lambdas.iter().min_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap()) {
        if l.abs() < opts.lambda_floor {
            return Err(Error::Degeneracy { lambda: l.abs(), floor: opts.lambda_floor });
        }
    }
    let t = DMatrix::from_columns(&cols);
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Hyperbolicity("eigenvector matrix is singular".into()))?;
    let dec = EigenDecomposition { lambdas, t, t_inv };
    if dec.reconstruction_error(a) > 1e-8 * scale {
        return Err(Error::Hyperbolicity("eigen-decomposition failed to reconstruct the jacobian".into()));
    }
    Ok(dec)
}

/// Decompose `A(state)` where `state` is the full state `U` (not the
/// perturbation).
pub fn eigendecompose(system: &FluxSystem, state: &[f64], opts: &EigenOptions) -> Result<EigenDecomposition> {
    decompose_matrix(&system.jacobian(state)?, opts)
}

/// Reject base states at which some characteristic speed is small; the
/// inflow/outflow split must be well defined.
pub fn check_noncharacteristic(system: &FluxSystem, min_speed: f64) -> Result<EigenDecomposition> {
    let dec = eigendecompose(system, &system.base_state, &EigenOptions::default())?;
    let slowest = dec.lambdas.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    if slowest < min_speed {
        return Err(Error::Degeneracy { lambda: slowest, floor: min_speed });
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psystem_speeds_at_base_state() {
        let s = FluxSystem::psystem();
        let d = eigendecompose(&s, &[1.0, 0.0], &EigenOptions::default()).unwrap();
        let r2 = 2f64.sqrt();
        assert!((d.lambdas[0] + r2).abs() < 1e-14 && (d.lambdas[1] - r2).abs() < 1e-14);
        let a = s.jacobian(&[1.0, 0.0]).unwrap();
        assert!(d.reconstruction_error(&a) < 1e-12);
        for j in 0..2 {
            assert!((d.t.column(j).norm() - 1.0).abs() < 1e-14);
            assert!(d.t[(0, j)] > 0.0);
        }
    }

    #[test]
    fn psystem_domain_error() {
        let s = FluxSystem::psystem();
        assert!(matches!(s.flux(&[-0.1, 0.0]), Err(Error::Domain { .. })));
        assert!(matches!(s.jacobian(&[0.0, 0.0]), Err(Error::Domain { .. })));
    }

    #[test]
    fn burgers_speed_and_floor() {
        let s = FluxSystem::burgers();
        let d = eigendecompose(&s, &[1.0], &EigenOptions::default()).unwrap();
        assert_eq!(d.lambdas, vec![1.0]);
        assert!(matches!(
            eigendecompose(&s, &[1e-4], &EigenOptions::default()),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn jacobian_matches_differences() {
        for (s, u) in [
            (FluxSystem::burgers(), vec![1.3]),
            (FluxSystem::psystem(), vec![0.8, 0.2]),
            (FluxSystem::linear2(), vec![0.1, -0.4]),
            (FluxSystem::advection(2.0), vec![0.5]),
        ] {
            assert!(jacobian_fd_check(&s, &u).unwrap() < 1e-7, "{}", s.name);
        }
    }

    #[test]
    fn rejects_complex_and_repeated_spectra() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(decompose_matrix(&rot, &EigenOptions::default()), Err(Error::Hyperbolicity(_))));
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(decompose_matrix(&id, &EigenOptions::default()), Err(Error::Hyperbolicity(_))));
    }

    #[test]
    fn three_by_three_symmetric() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let d = decompose_matrix(&a, &EigenOptions::default()).unwrap();
        assert!(d.reconstruction_error(&a) < 1e-10);
        assert!(d.lambdas.windows(2).all(|w| w[0] < w[1]));
        // the middle eigenvalue of this tridiagonal matrix is exactly 3
        assert!((d.lambdas[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn noncharacteristic_catalog() {
        for name in ["advection", "burgers", "psystem", "linear2"] {
            check_noncharacteristic(&FluxSystem::from_name(name).unwrap(), 0.5).unwrap();
        }
    }
}
