use inflow_core::systems::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn check(dec: &EigenDecomposition, a: &DMatrix<f64>) {
    assert!(dec.reconstruction_error(a) < 1e-10 * a.amax().max(1.0));
    assert!(dec.lambdas.windows(2).all(|w| w[0] < w[1]));
    for j in 0..dec.lambdas.len() {
        let col = dec.t.column(j);
        assert!((col.norm() - 1.0).abs() < 1e-12);
        let lead = col.iter().copied().find(|x| x.abs() > 1e-12).unwrap();
        assert!(lead > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn psystem_decomposition(v in 0.3f64..3.0, u in -2.0f64..2.0) {
        let s = FluxSystem::psystem();
        let a = s.jacobian(&[v, u]).unwrap();
        let dec = eigendecompose(&s, &[v, u], &EigenOptions::default()).unwrap();
        check(&dec, &a);
        // speeds are +-sqrt(-p'(v)) = +-sqrt(2) v^{-3/2}
        let c = 2f64.sqrt() * v.powf(-1.5);
        prop_assert!((dec.lambdas[1] - c).abs() < 1e-12 * c.max(1.0));
    }

    #[test]
    fn characteristic_roundtrip(v in 0.5f64..2.0, u in -1.0f64..1.0, w0 in -1.0f64..1.0, w1 in -1.0f64..1.0) {
        let s = FluxSystem::psystem();
        let dec = eigendecompose(&s, &[v, u], &EigenOptions::default()).unwrap();
        let back = dec.from_characteristic(&dec.to_characteristic(&[w0, w1]));
        prop_assert!((back[0] - w0).abs() < 1e-12 && (back[1] - w1).abs() < 1e-12);
    }

    #[test]
    fn random_symmetric_matrices(entries in proptest::collection::vec(-1.0f64..1.0, 10), n in 3usize..=4) {
        // diagonal shift spreads the spectrum so eigenvalues stay distinct
        let mut a = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                a[(i, j)] = entries[k % entries.len()];
                a[(j, i)] = a[(i, j)];
                k += 1;
            }
            a[(i, i)] += 3.0 * i as f64 + 1.0;
        }
        let dec = decompose_matrix(&a, &EigenOptions { lambda_floor: 0.0 }).unwrap();
        check(&dec, &a);
    }

    #[test]
    fn jacobians_match_finite_differences(v in 0.3f64..3.0, u in -2.0f64..2.0) {
        prop_assert!(jacobian_fd_check(&FluxSystem::psystem(), &[v, u]).unwrap() < 1e-6);
        prop_assert!(jacobian_fd_check(&FluxSystem::burgers(), &[u]).unwrap() < 1e-8);
    }
}

#[test]
fn nonsymmetric_real_spectrum() {
    // upper triangular with distinct diagonal
    let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, 0.0, -2.0, 1.0, 0.0, 0.0, 4.0]);
    let dec = decompose_matrix(&a, &EigenOptions::default()).unwrap();
    check(&dec, &a);
    assert!((dec.lambdas[0] + 2.0).abs() < 1e-12 && (dec.lambdas[2] - 4.0).abs() < 1e-12);
}

#[test]
fn domain_errors_name_the_system() {
    let err = FluxSystem::psystem().jacobian(&[-1.0, 0.0]).unwrap_err();
    assert!(err.to_string().contains("psystem"));
}
