//! Hardness constructions as executable builders: circuit to block matrix
//! (matrix inversion), circuit to clock Hamiltonian, sparse Hamiltonian to
//! quantum walk, and the precise / frustration-free validity checks.

mod clock;
mod qca;
mod walk;

pub use clock::{circuit_to_clock, clock_history_state, gate_row, ClockHamiltonian, ClockRows};
pub use qca::{
    default_clock_offset, qca_entry_formula, qca_kappa_bound, qca_to_matinv, qca_to_matinv_with_offset,
    to_matinv_instance, CycleUnitary,
};
pub use walk::{childs_walk, WalkBlock, WalkUnitary};

use alloc::string::String;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::numerics::{decompose_with_cap, SparseRowMatrix};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    QcaMatinv,
    Clock,
    Walk,
}

impl ReductionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionKind::QcaMatinv => "qca-matinv",
            ReductionKind::Clock => "clock",
            ReductionKind::Walk => "walk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "qca-matinv" | "qca" => Some(ReductionKind::QcaMatinv),
            "clock" => Some(ReductionKind::Clock),
            "walk" => Some(ReductionKind::Walk),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Thresholds {
    /// lambda_min <= a or >= b
    MinEig { a: f64, b: f64 },
    /// |H^-1(s, t)| >= b or <= a
    MatInv { s: usize, t: usize, a: f64, b: f64 },
    None,
}

/// Extra facts a reduction records next to its matrix.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArtifactMeta {
    /// Gate count T of the source circuit.
    pub gates: Option<usize>,
    /// Qubit count of the source circuit.
    pub qubits: Option<usize>,
    pub clock_offset: Option<usize>,
    /// A-priori condition-number bound of the emitted matrix.
    pub kappa: Option<f64>,
    /// (X, d) for walks.
    pub walk: Option<(f64, usize)>,
}

#[derive(Clone, Debug)]
pub struct ReductionArtifact {
    pub matrix: SparseRowMatrix,
    pub kind: ReductionKind,
    pub thresholds: Thresholds,
    /// Hex SHA-256 of the source's canonical bytes.
    pub provenance: String,
    pub meta: ArtifactMeta,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// (1 - s)/T^3 - (1 - c)/(T + 1)
pub fn precise_lh_gap(t: usize, c: f64, s: f64) -> f64 {
    let t = t as f64;
    (1.0 - s) / (t * t * t) - (1.0 - c) / (t + 1.0)
}

pub fn precise_lh_validity(t: usize, c: f64, s: f64) -> bool {
    precise_lh_validity_with(t, c, s, 0.0)
}

/// False for T = 0 or (c, s) outside [0, 1].
pub fn precise_lh_validity_with(t: usize, c: f64, s: f64, threshold: f64) -> bool {
    if t == 0 || !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) {
        return false;
    }
    precise_lh_gap(t, c, s) > threshold
}

/// Smallest eigenvalue of H and whether it is within `1e-10 ||H||` of zero.
pub fn frustration_free_check(h: &SparseRowMatrix) -> Result<(bool, f64)> {
    frustration_free_check_with(h, None, tolerances::dense_cap())
}

pub fn frustration_free_check_with(h: &SparseRowMatrix, tolerance: Option<f64>, cap: usize) -> Result<(bool, f64)> {
    let d = decompose_with_cap(h, cap)?;
    let tol = tolerance.unwrap_or(tolerances::EXACT * d.norm());
    let lmin = d.min();
    Ok((lmin <= tol, lmin))
}
