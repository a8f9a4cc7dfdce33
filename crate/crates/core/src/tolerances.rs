//! Tolerances shared by validation code and tests.

/// Entries that should agree up to rounding of exact arithmetic.
pub const EXACT: f64 = 1e-10;

/// Orthonormality and residual bound for dense Hermitian eigensolves,
/// relative to the operator norm.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Relative slack when checking a promise against the classical oracle.
pub const PROMISE: f64 = 1e-10;

/// Embedded gate matrices must be unitary to this precision.
pub const GATE_UNITARY: f64 = 1e-12;

/// Eigenvalues in `[-PSD_CLAMP * norm, 0]` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-12;

/// Smallest |eigenvalue| relative to the norm before a matrix is singular.
pub const SINGULAR: f64 = 1e-12;

use core::sync::atomic::{AtomicUsize, Ordering};

/// Default cap on the dimension handed to the dense eigensolver.
pub const DENSE_CAP: usize = 4096;

static DENSE_CAP_OVERRIDE: AtomicUsize = AtomicUsize::new(DENSE_CAP);

/// Current dense dimension cap, [`DENSE_CAP`] unless overridden.
pub fn dense_cap() -> usize {
    DENSE_CAP_OVERRIDE.load(Ordering::Relaxed)
}

/// Process-wide override of the dense cap (the CLI reads it from the environment).
pub fn set_dense_cap(cap: usize) {
    DENSE_CAP_OVERRIDE.store(cap, Ordering::Relaxed);
}

/// Probability distributions must sum to one within this.
pub const DISTRIBUTION_SUM: f64 = 1e-9;

/// Largest statevector dimension simulated for gate-level cross-checks.
pub const STATE_CAP: usize = 1 << 22;
