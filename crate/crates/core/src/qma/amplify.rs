use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use super::{AcceptanceOperator, Verifier, VerifierHandle};
use crate::circuit::{Gate, StateVector, UniformCircuit, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::{inner, DenseMatrix, C64};
use crate::spectral::{ancilla_count, in_window, outcome_probability, pe_gates, window_probability};
use crate::tolerances;

/// Per-trial failure probability of the median variant.
pub const MEDIAN_TRIAL_FAILURE: f64 = 1.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Amplification {
    /// One phase estimation of R1 R0 with failure 2^-r.
    PhaseEstimation,
    /// r phase estimations with failure 1/16 each; YES if the lower median
    /// is inside the window.
    Median,
}

/// In-place amplified verifier. Evaluated exactly through the Jordan
/// decomposition of the base acceptance operator: on the block of an
/// eigenvector q_i with acceptance p_i, R1 R0 has eigenphases
/// +-arccos(sqrt p_i)/pi (turns).
#[derive(Clone, Debug)]
pub struct AmplifiedVerifier {
    base: VerifierHandle,
    base_q: AcceptanceOperator,
    q: AcceptanceOperator,
    pub variant: Amplification,
    pub r: usize,
    pub phi_c: f64,
    pub phi_s: f64,
    pub cutoff: f64,
    pub precision: f64,
    /// Register bits per phase estimation.
    pub bits: usize,
}

pub fn gap_amplify_pe(v: VerifierHandle, r: usize) -> Result<AmplifiedVerifier> {
    AmplifiedVerifier::new(v, r, Amplification::PhaseEstimation)
}

pub fn gap_amplify_median(v: VerifierHandle, r: usize) -> Result<AmplifiedVerifier> {
    AmplifiedVerifier::new(v, r, Amplification::Median)
}

/// arccos(sqrt p)/pi
fn turns_of(p: f64) -> f64 {
    p.clamp(0.0, 1.0).sqrt().acos() / PI
}

impl AmplifiedVerifier {
    pub fn new(base: VerifierHandle, r: usize, variant: Amplification) -> Result<Self> {
        let (c, s) = (base.completeness(), base.soundness());
        if c <= s {
            return Err(Error::InvalidParameter(alloc::format!("amplification needs c > s, got c = {c}, s = {s}")));
        }
        if r == 0 || r > 40 {
            return Err(Error::InvalidParameter(alloc::format!("r = {r} outside [1, 40]")));
        }
        let phi_c = turns_of(c);
        let phi_s = turns_of(s);
        let cutoff = (phi_c + phi_s) / 2.0;
        let precision = (phi_s - phi_c) / 4.0;
        let failure = match variant {
            Amplification::PhaseEstimation => 0.5f64.powi(r as i32),
            Amplification::Median => MEDIAN_TRIAL_FAILURE,
        };
        let bits = ancilla_count(precision, failure);
        if bits > crate::spectral::MAX_PE_BITS {
            return Err(Error::Capacity { dim: 1usize << bits.min(63), cap: 1 << crate::spectral::MAX_PE_BITS });
        }
        let base_q = base.acceptance_operator()?;
        let mut amp = AmplifiedVerifier { base, q: base_q.clone(), base_q, variant, r, phi_c, phi_s, cutoff, precision, bits };
        let spec = amp.base_q.decomposition();
        let values: Vec<f64> = spec.eigenvalues.iter().map(|p| amp.block_acceptance(*p)).collect();
        amp.q = AcceptanceOperator::from_spectrum(&values, &spec.eigenvectors)?;
        Ok(amp)
    }

    pub fn base(&self) -> &VerifierHandle {
        &self.base
    }

    pub fn base_operator(&self) -> &AcceptanceOperator {
        &self.base_q
    }

    /// Number of phase-estimation registers.
    pub fn registers(&self) -> usize {
        match self.variant {
            Amplification::PhaseEstimation => 1,
            Amplification::Median => self.r,
        }
    }

    /// Ancillas added on top of the base verifier: registers plus the
    /// output flag.
    pub fn overhead(&self) -> usize {
        self.registers() * self.bits + 1
    }

    /// Probability that one estimation of the phase +-phi lands inside the window.
    pub fn trial_acceptance(&self, p: f64) -> f64 {
        window_probability(turns_of(p), self.bits, self.cutoff)
    }

    /// Acceptance of the amplified verifier on the Jordan block whose base
    /// acceptance is p.
    pub fn block_acceptance(&self, p: f64) -> f64 {
        let q = self.trial_acceptance(p);
        match self.variant {
            Amplification::PhaseEstimation => q,
            Amplification::Median => binomial_tail(self.r, self.r.div_ceil(2), q),
        }
    }

    /// Acceptance computed from the base verifier's optimal witness.
    pub fn measured_completeness(&self) -> f64 {
        self.block_acceptance(self.base_q.max_acceptance())
    }

    /// Monte Carlo run on a pure witness: picks a Jordan block, the sign
    /// of the eigenphase, then samples every register outcome.
    pub fn sample_run<R: Rng + ?Sized>(&self, witness: &StateVector, rng: &mut R) -> Result<bool> {
        let spec = self.base_q.decomposition();
        if witness.dim() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), got: witness.dim() });
        }
        let weights: Vec<f64> = spec.eigenvectors.iter().map(|v| inner(v, witness.amplitudes()).norm_sqr()).collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut block = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                block = i;
                break;
            }
            u -= w;
        }
        let phi = turns_of(spec.eigenvalues[block]);
        let phase = if rng.random::<bool>() { phi } else { -phi };
        let hits = (0..self.registers())
            .filter(|_| in_window(sample_outcome(phase, self.bits, rng), self.bits, self.cutoff))
            .count();
        Ok(match self.variant {
            Amplification::PhaseEstimation => hits == 1,
            Amplification::Median => hits >= self.r.div_ceil(2),
        })
    }

    /// R1 R0 on the base verifier's qubits, R0 = 2 Pi0 - I fixing the base
    /// ancillas to zero, R1 = V^dag (2|1><1|_out - I) V.
    pub fn walk_operator(&self) -> Result<DenseMatrix> {
        let circuit = self.base.to_circuit()?;
        let v = circuit.to_dense()?;
        let n = v.dim();
        let m = self.base.witness_qubits();
        let out = 1usize << circuit.out();
        let r0 = DenseMatrix::diagonal(
            &(0..n).map(|i| C64::new(if i >> m == 0 { 1.0 } else { -1.0 }, 0.0)).collect::<Vec<_>>(),
        );
        let refl = DenseMatrix::diagonal(
            &(0..n).map(|i| C64::new(if i & out != 0 { 1.0 } else { -1.0 }, 0.0)).collect::<Vec<_>>(),
        );
        let r1 = v.adjoint().mul(&refl).mul(&v);
        Ok(r1.mul(&r0))
    }

    /// Gate-level circuit: base qubits first, then the registers, then the
    /// output flag. Only feasible for small verifiers.
    pub fn circuit(&self) -> Result<UniformCircuit> {
        let base_circuit = self.base.to_circuit()?;
        let nb = base_circuit.qubits();
        let total = nb + self.overhead();
        if total > 22 || 1usize << total > tolerances::STATE_CAP {
            return Err(Error::Capacity { dim: 1usize << total.min(63), cap: tolerances::STATE_CAP });
        }
        let w = self.walk_operator()?;
        let system: Vec<usize> = (0..nb).collect();
        let mut gates = Vec::new();
        for j in 0..self.registers() {
            let reg: Vec<usize> = (nb + j * self.bits..nb + (j + 1) * self.bits).collect();
            gates.extend(pe_gates(&w, &system, &reg)?);
        }
        let flip = ThresholdFlip {
            bits: self.bits,
            registers: self.registers(),
            cutoff: self.cutoff,
            needed: match self.variant {
                Amplification::PhaseEstimation => 1,
                Amplification::Median => self.r.div_ceil(2),
            },
        };
        let targets: Vec<usize> = (nb..total).collect();
        gates.push(Gate::controlled(Arc::new(flip), targets, vec![]));
        UniformCircuit::new(total, total - 1, gates)
    }
}

impl Verifier for AmplifiedVerifier {
    fn witness_qubits(&self) -> usize {
        self.base.witness_qubits()
    }

    fn ancilla_qubits(&self) -> usize {
        self.base.ancilla_qubits() + self.overhead()
    }

    fn completeness(&self) -> f64 {
        1.0 - 0.5f64.powi(self.r as i32)
    }

    fn soundness(&self) -> f64 {
        0.5f64.powi(self.r as i32)
    }

    fn acceptance_operator(&self) -> Result<AcceptanceOperator> {
        Ok(self.q.clone())
    }

    fn to_circuit(&self) -> Result<UniformCircuit> {
        self.circuit()
    }
}

/// Flips the flag (top qubit) when at least `needed` of the registers hold
/// an outcome inside the folded window [0, cutoff]. A permutation, so
/// self-inverse.
#[derive(Clone, Debug)]
pub struct ThresholdFlip {
    pub bits: usize,
    pub registers: usize,
    pub cutoff: f64,
    pub needed: usize,
}

impl ThresholdFlip {
    fn fires(&self, index: usize) -> bool {
        let mask = (1usize << self.bits) - 1;
        (0..self.registers)
            .filter(|j| in_window(index >> (j * self.bits) & mask, self.bits, self.cutoff))
            .count()
            >= self.needed
    }
}

impl UnitaryOp for ThresholdFlip {
    fn dim(&self) -> usize {
        1usize << (self.bits * self.registers + 1)
    }

    fn apply(&self, v: &mut [C64]) {
        let flag = 1usize << (self.bits * self.registers);
        for i in 0..flag {
            if self.fires(i) {
                v.swap(i, i | flag);
            }
        }
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.apply(v)
    }
}

/// P(Binomial(n, q) >= k)
pub fn binomial_tail(n: usize, k: usize, q: f64) -> f64 {
    let mut total = 0.0;
    let mut coeff = 1.0;
    for j in 0..=n {
        if j > 0 {
            coeff = coeff * (n - j + 1) as f64 / j as f64;
        }
        if j >= k {
            total += coeff * q.powi(j as i32) * (1.0 - q).powi((n - j) as i32);
        }
    }
    total.clamp(0.0, 1.0)
}

fn sample_outcome<R: Rng + ?Sized>(phase: f64, bits: usize, rng: &mut R) -> usize {
    let m = 1usize << bits;
    let mut u = rng.random::<f64>();
    for y in 0..m {
        let p = outcome_probability(phase, y, bits);
        if u < p {
            return y;
        }
        u -= p;
    }
    m - 1
}
