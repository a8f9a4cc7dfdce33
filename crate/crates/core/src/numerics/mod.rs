//! Complex linear-algebra substrate: sparse-row and dense Hermitian
//! matrices, exact spectral decomposition, classical inverse oracles,
//! FFT and seeded random ensembles.

mod dense;
pub(crate) mod eigen;
mod fft;
pub mod random;
mod sparse;

pub use dense::DenseMatrix;
pub use eigen::{
    classical_inverse_entry, condition_bound, condition_number, decompose, decompose_with_cap,
    unitary_eigen, ConditionBound, SpectralDecomposition, UnitaryEigen,
};
pub use fft::{fft_in_place, FftDirection};
pub use sparse::{RowOracle, SparseRowMatrix};

use num_complex::Complex;

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// e^{i x}
#[inline]
pub fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// log2 of a power of two.
pub fn log2_exact(n: usize) -> Option<usize> {
    is_power_of_two(n).then(|| n.trailing_zeros() as usize)
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    num_traits::Float::sqrt(norm_sqr(a))
}

/// Normalizes in place and returns the previous norm.
pub fn normalize(a: &mut [C64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Distance between the rays spanned by two unit vectors, minimized over a
/// global phase: sqrt(1 - |<a|b>|^2), the trace distance of the pure states.
pub fn trace_distance_pure(a: &[C64], b: &[C64]) -> f64 {
    let ov = inner(a, b).norm_sqr() / (norm_sqr(a) * norm_sqr(b));
    num_traits::Float::sqrt((1.0 - ov).max(0.0))
}

pub fn fidelity_pure(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr() / (norm_sqr(a) * norm_sqr(b))
}

/// Reduces an angle to (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    use core::f64::consts::PI;
    let tau = 2.0 * PI;
    let mut y = x % tau;
    if y <= -PI {
        y += tau;
    } else if y > PI {
        y -= tau;
    }
    y
}
