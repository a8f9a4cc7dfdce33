//! Seeded random ensembles used by tests, corpora and error injection.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{inner, normalize, DenseMatrix, SparseRowMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial seed derived from a base seed (splitmix64).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unit vector.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    normalize(&mut v);
    v
}

/// Haar-random unitary, columns from Gram-Schmidt on Gaussian vectors.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        // Two passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        if normalize(&mut v) > 1e-6 {
            cols.push(v);
        }
    }
    DenseMatrix::from_columns(&cols)
}

/// Q diag(spectrum) Q^dagger for a Haar-random Q.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> DenseMatrix {
    let n = spectrum.len();
    let q = random_unitary(n, rng);
    let mut m = DenseMatrix::zeros(n);
    for (k, lam) in spectrum.iter().enumerate() {
        for i in 0..n {
            let a = q[(i, k)] * *lam;
            for j in 0..n {
                m[(i, j)] += a * q[(j, k)].conj();
            }
        }
    }
    // Exact Hermitian symmetry.
    DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else if i < j {
            m[(i, j)]
        } else {
            m[(j, i)].conj()
        }
    })
}

/// Random Hermitian sparse matrix: each off-diagonal pair is present with
/// probability `density`, entries have modulus at most one, and the
/// diagonal is drawn from `[0, 1)`.
pub fn random_sparse_hermitian<R: Rng + ?Sized>(dim: usize, density: f64, rng: &mut R) -> SparseRowMatrix {
    let mut upper = Vec::new();
    for i in 0..dim {
        let d: f64 = rng.random();
        if d > 0.3 {
            upper.push((i, i, C64::new(d, 0.0)));
        }
        for j in (i + 1)..dim {
            if rng.random::<f64>() < density {
                let r: f64 = rng.random_range(0.1..1.0);
                let th: f64 = rng.random_range(-core::f64::consts::PI..core::f64::consts::PI);
                upper.push((i, j, C64::from_polar(r, th)));
            }
        }
    }
    SparseRowMatrix::from_upper(dim, &upper).expect("generated entries are valid")
}

/// Dense random matrix as a SparseRowMatrix (all entries stored).
pub fn dense_as_sparse(m: &DenseMatrix) -> SparseRowMatrix {
    SparseRowMatrix::from_dense(m, 0.0).expect("input is Hermitian")
}

pub fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..(2.0 * core::f64::consts::PI))
}
