use proptest::prelude::*;
use qspace_core::numerics::random::{hermitian_with_spectrum, random_unitary, seeded};
use qspace_core::numerics::{
    c, classical_inverse_entry, condition_bound, decompose, fft_in_place, unitary_eigen, DenseMatrix,
    FftDirection, SparseRowMatrix, C64,
};
use qspace_core::Error;

#[test]
fn identity_spectrum() {
    let d = decompose(&SparseRowMatrix::identity(4).unwrap()).unwrap();
    assert_eq!(d.eigenvalues, vec![1.0; 4]);
}

#[test]
fn diagonal_spectrum_and_vectors() {
    let h = SparseRowMatrix::diagonal(&[0.7, 0.2]).unwrap();
    let d = decompose(&h).unwrap();
    assert!((d.eigenvalues[0] - 0.2).abs() < 1e-15);
    assert!((d.eigenvalues[1] - 0.7).abs() < 1e-15);
    assert!((d.eigenvectors[0][1].norm() - 1.0).abs() < 1e-15);
    assert!((d.eigenvectors[1][0].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn construct_then_recover() {
    let mut rng = seeded(11);
    let spectrum: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let m = hermitian_with_spectrum(&spectrum, &mut rng);
    let d = decompose(&m).unwrap();
    for (a, b) in d.eigenvalues.iter().zip(&spectrum) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    assert!(d.max_residual(&m) <= 1e-10);
    assert!(d.orthonormality_defect() <= 1e-10);
    assert!(d.reconstruct().max_abs_diff(&m) <= 1e-9);
}

#[test]
fn non_hermitian_and_capacity_errors() {
    let m = DenseMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    assert!(matches!(decompose(&m), Err(Error::Validation(_))));
    let big = SparseRowMatrix::identity(8192).unwrap();
    assert!(matches!(decompose(&big), Err(Error::Capacity { .. })));
    assert!(SparseRowMatrix::from_rows(3, vec![vec![]; 3]).is_err());
}

#[test]
fn inverse_entries() {
    let id = SparseRowMatrix::identity(4).unwrap();
    assert!((classical_inverse_entry(&id, 2, 2).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    assert!(classical_inverse_entry(&id, 1, 2).unwrap().norm() < 1e-15);
    let h = SparseRowMatrix::diagonal(&[1.0, 0.5]).unwrap();
    assert!((classical_inverse_entry(&h, 1, 1).unwrap().re - 2.0).abs() < 1e-14);
    let sing = SparseRowMatrix::diagonal(&[1.0, 0.0]).unwrap();
    assert!(matches!(classical_inverse_entry(&sing, 0, 0), Err(Error::Singular { .. })));
}

#[test]
fn condition_numbers() {
    let h = SparseRowMatrix::diagonal(&[1.0, 0.125]).unwrap();
    assert!((condition_bound(&h).unwrap().kappa - 8.0).abs() < 1e-12);
    let mut rng = seeded(5);
    let spectrum: Vec<f64> = (0..16).map(|k| 0.05 + 0.95 * k as f64 / 15.0).collect();
    let m = SparseRowMatrix::from_dense(&hermitian_with_spectrum(&spectrum, &mut rng), 0.0).unwrap();
    let cb = condition_bound(&m).unwrap();
    assert!((cb.kappa - 20.0).abs() < 1e-9, "{}", cb.kappa);
    assert!(cb.gershgorin_norm >= cb.lambda_max);
    let indefinite = SparseRowMatrix::diagonal(&[1.0, -0.5]).unwrap();
    assert!(matches!(condition_bound(&indefinite), Err(Error::NotPsd { .. })));
}

#[test]
fn psd_clamp() {
    let h = SparseRowMatrix::diagonal(&[1.0, -1e-14]).unwrap();
    let mut d = decompose(&h).unwrap();
    assert_eq!(d.clamp_psd().unwrap(), 1);
    assert_eq!(d.min(), 0.0);
}

#[test]
fn fft_matches_direct_dft() {
    let mut rng = seeded(3);
    let x = qspace_core::numerics::random::random_state(16, &mut rng);
    let mut y = x.clone();
    fft_in_place(&mut y, FftDirection::Forward);
    for (k, yk) in y.iter().enumerate() {
        let direct: C64 = x
            .iter()
            .enumerate()
            .map(|(j, xj)| xj * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / 16.0))
            .sum();
        assert!((direct - yk).norm() < 1e-12);
    }
    fft_in_place(&mut y, FftDirection::Inverse);
    for (a, b) in x.iter().zip(&y) {
        assert!((a * 16.0 - b).norm() < 1e-12);
    }
}

#[test]
fn unitary_eigen_random_and_degenerate() {
    let mut rng = seeded(9);
    let u = random_unitary(12, &mut rng);
    let e = unitary_eigen(&u).unwrap();
    assert!(e.max_residual(&u) < 1e-10);
    // Degenerate: a reflection has only phases 0 and pi.
    let v = qspace_core::numerics::random::random_state(8, &mut rng);
    let r = DenseMatrix::from_fn(8, |i, j| v[i] * v[j].conj() * 2.0 - if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let e = unitary_eigen(&r).unwrap();
    assert!(e.max_residual(&r) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_times_matrix_is_identity(seed in 0u64..1000, n in 1usize..4) {
        let dim = 1 << n;
        let mut rng = seeded(seed);
        let spectrum: Vec<f64> = (0..dim).map(|k| 0.1 + 0.9 * k as f64 / dim as f64).collect();
        let h = SparseRowMatrix::from_dense(&hermitian_with_spectrum(&spectrum, &mut rng), 0.0).unwrap();
        let d = decompose(&h).unwrap();
        let inv = DenseMatrix::from_fn(dim, |s, t| {
            d.eigenvalues.iter().zip(&d.eigenvectors).map(|(l, v)| v[s] * v[t].conj() / *l).sum()
        });
        let prod = h.to_dense().mul(&inv);
        prop_assert!(prod.max_abs_diff(&DenseMatrix::identity(dim)) < 1e-9);
        let e = classical_inverse_entry(&h, 0, dim - 1).unwrap();
        prop_assert!((e - inv[(0, dim - 1)]).norm() < 1e-12);
    }

    #[test]
    fn upper_round_trip_is_bit_exact(seed in 0u64..1000) {
        let mut rng = seeded(seed);
        let h = qspace_core::numerics::random::random_sparse_hermitian(8, 0.4, &mut rng);
        let again = SparseRowMatrix::from_upper(8, &h.upper_entries()).unwrap();
        prop_assert_eq!(h, again);
    }
}
