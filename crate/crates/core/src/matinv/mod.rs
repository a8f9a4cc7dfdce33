//! Well-conditioned matrix inversion: the W_H unitary, the Grover rotation
//! built on it, and the three output tasks plus the MATINV decision.

mod wh;

pub use wh::{build_wh, decode, flag_amplitude, register_bits, window_amplitude, WhOperator, WhResponse, T0};

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::circuit::{Gate, OpHandle, StateVector, UniformCircuit};
use crate::error::{Error, Result};
use crate::tolerances;
use crate::numerics::{c, decompose, inner, normalize, SparseRowMatrix, SpectralDecomposition, C64, ONE, ZERO};
use crate::spectral::{folded_phase, grover_rotation, phase_estimate, GroverRotation, PhaseEstimate, Projector};

/// Failure budget of the phase estimation on the Grover rotation.
pub const GROVER_FAILURE: f64 = 0.02;
/// Independent entry estimates whose median decides MATINV.
pub const DECISION_REPEATS: usize = 7;

/// A MATINV instance: decide whether |H^-1(s,t)| >= b or <= a.
#[derive(Clone, Debug)]
pub struct MatInvInstance {
    pub h: SparseRowMatrix,
    pub kappa: f64,
    pub s: usize,
    pub t: usize,
    pub a_thresh: f64,
    pub b_thresh: f64,
    spec: Arc<SpectralDecomposition>,
}

impl MatInvInstance {
    /// Requires kappa^-1 I <= H <= I against the exact spectrum.
    pub fn new(h: SparseRowMatrix, kappa: f64, s: usize, t: usize, a_thresh: f64, b_thresh: f64) -> Result<Self> {
        let inst = Self::new_indefinite(h, kappa, s, t, a_thresh, b_thresh)?;
        if let Some(l) = inst.spec.eigenvalues.iter().find(|l| **l < 0.0) {
            return Err(Error::InvalidInstance(alloc::format!("negative eigenvalue {l}")));
        }
        Ok(inst)
    }

    /// Only requires kappa^-1 <= |lambda| <= 1, as for the block matrices
    /// produced by the circuit reduction.
    pub fn new_indefinite(
        h: SparseRowMatrix,
        kappa: f64,
        s: usize,
        t: usize,
        a_thresh: f64,
        b_thresh: f64,
    ) -> Result<Self> {
        if !(0.0 <= a_thresh && a_thresh < b_thresh && b_thresh.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "thresholds must satisfy 0 <= a < b, got ({a_thresh}, {b_thresh})"
            )));
        }
        if s >= h.dim() || t >= h.dim() {
            return Err(Error::InvalidParameter(alloc::format!("index out of range for dim {}", h.dim())));
        }
        let spec = Arc::new(decompose(&h)?);
        wh::check_spectrum(&spec, kappa)?;
        Ok(MatInvInstance { h, kappa, s, t, a_thresh, b_thresh, spec })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn data_qubits(&self) -> usize {
        self.h.qubits()
    }

    /// |H^-1(s,t)| from the exact spectrum.
    pub fn classical_entry(&self) -> f64 {
        crate::numerics::eigen::inverse_entry_from(&self.spec, self.s, self.t)
            .map(|z| z.norm())
            .unwrap_or(f64::INFINITY)
    }

    /// The decision the promise implies, or a promise-violation error.
    pub fn oracle_decision(&self) -> Result<bool> {
        let e = self.classical_entry();
        let slack = tolerances::PROMISE * e.max(1.0);
        if e >= self.b_thresh - slack {
            Ok(true)
        } else if e <= self.a_thresh + slack {
            Ok(false)
        } else {
            Err(Error::PromiseViolation(alloc::format!(
                "|H^-1({}, {})| = {e} lies strictly between {} and {}",
                self.s,
                self.t,
                self.a_thresh,
                self.b_thresh
            )))
        }
    }
}

/// X gates preparing basis state `index` on `qubits` qubits.
pub fn basis_prep(qubits: usize, index: usize) -> Result<UniformCircuit> {
    let gates = (0..qubits).filter(|q| index >> q & 1 == 1).map(Gate::x).collect();
    UniformCircuit::new(qubits.max(1), 0, gates)
}

/// Result of an estimate obtained by phase estimation on a Grover rotation.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: f64,
    /// sin(theta) of the rotation plane, i.e. the exact overlap the
    /// estimate targets divided by kappa.
    pub overlap: f64,
    pub phase: f64,
    /// Register bits of the outer estimation.
    pub pe_bits: usize,
    /// ell of W_H.
    pub wh_ancillas: usize,
}

impl Estimate {
    pub fn ancillas(&self) -> usize {
        self.pe_bits + self.wh_ancillas
    }
}

/// Outcome of one attempt at preparing H^-1|b>/||H^-1|b>||.
#[derive(Clone, Debug)]
pub struct SolutionSample {
    pub success: bool,
    /// Data-register state on success.
    pub state: Option<StateVector>,
    /// Probability that this attempt's ancilla check passes.
    pub success_probability: f64,
    pub attempts: usize,
}

/// An instance together with W_H built for target accuracy eps, with
/// eps' = eps/(4 kappa).
#[derive(Clone, Debug)]
pub struct MatInvSolver {
    pub instance: MatInvInstance,
    pub eps: f64,
    wh: Arc<WhOperator>,
}

impl MatInvSolver {
    pub fn new(instance: MatInvInstance, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("eps = {eps} outside (0, 1)")));
        }
        let bits = register_bits(instance.kappa, eps / (4.0 * instance.kappa));
        Self::with_register_bits(instance, eps, bits)
    }

    /// Same with an explicit W_H register size; small sizes keep the full
    /// space within reach of dense checks.
    pub fn with_register_bits(instance: MatInvInstance, eps: f64, bits: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("eps = {eps} outside (0, 1)")));
        }
        let eps_prime = eps / (4.0 * instance.kappa);
        let wh = WhOperator::from_parts(instance.h.clone(), instance.spec.clone(), instance.kappa, eps_prime, bits)?;
        Ok(MatInvSolver { instance, eps, wh: Arc::new(wh) })
    }

    pub fn wh(&self) -> &WhOperator {
        &self.wh
    }

    pub fn wh_handle(&self) -> OpHandle {
        self.wh.clone()
    }

    fn prepare(&self, prep: &UniformCircuit) -> Result<Vec<C64>> {
        let k = self.instance.data_qubits();
        if prep.qubits() != k {
            return Err(Error::DimensionMismatch { expected: k, got: prep.qubits() });
        }
        Ok(prep.simulate(&StateVector::zero(k))?.into_amplitudes())
    }

    fn grover_estimate<R: Rng + ?Sized>(&self, overlap: f64, rng: &mut R) -> Result<(Estimate, PhaseEstimate)> {
        let kappa = self.instance.kappa;
        let r = plane_rotation(overlap)?;
        let pe = phase_estimate(&r, &StateVector::basis(1, 0), self.eps / (2.0 * kappa * PI), GROVER_FAILURE, rng)?;
        let bits = pe.ancillas_used;
        let theta = PI * folded_phase(pe.outcome, bits);
        let est = Estimate {
            value: kappa * theta.sin().abs(),
            overlap,
            phase: pe.phase,
            pe_bits: bits,
            wh_ancillas: self.wh.ell(),
        };
        Ok((est, pe))
    }

    /// Estimate of ||H^-1 |b>|| within eps.
    pub fn estimate_norm<R: Rng + ?Sized>(&self, b_prep: &UniformCircuit, rng: &mut R) -> Result<Estimate> {
        let b = self.prepare(b_prep)?;
        let alpha = self.wh.response(&b)?.alpha;
        Ok(self.grover_estimate(alpha, rng)?.0)
    }

    /// Estimate of |<a|H^-1|b>| within eps.
    pub fn estimate_entry<R: Rng + ?Sized>(
        &self,
        a_prep: &UniformCircuit,
        b_prep: &UniformCircuit,
        rng: &mut R,
    ) -> Result<Estimate> {
        let a = self.prepare(a_prep)?;
        let b = self.prepare(b_prep)?;
        let z = self.wh.response(&b)?.clean;
        Ok(self.grover_estimate(inner(&a, &z).norm(), rng)?.0)
    }

    /// One attempt: estimate the Grover phase, apply W_H to the residual
    /// and keep the data register if the flag and register read zero.
    pub fn sample_solution_state<R: Rng + ?Sized>(&self, b_prep: &UniformCircuit, rng: &mut R) -> Result<SolutionSample> {
        let b = self.prepare(b_prep)?;
        let resp = self.wh.response(&b)?;
        let alpha = resp.alpha;
        let (_, pe) = self.grover_estimate(alpha, rng)?;
        let r = pe.residual_state.amplitudes();
        // W_H (r0 v + r1 v_perp) has flag-0 amplitude r0 alpha + r1 sqrt(1 - alpha^2)
        // along |0>|psi_b>.
        let flag0 = r[0] * alpha + r[1] * (1.0 - alpha * alpha).max(0.0).sqrt();
        let clean = crate::numerics::norm_sqr(&resp.clean);
        let p = (flag0.norm_sqr() * clean / (alpha * alpha)).clamp(0.0, 1.0);
        let success = rng.random::<f64>() < p;
        let state = if success {
            let mut z = resp.clean;
            normalize(&mut z);
            Some(StateVector::from_amplitudes(z)?)
        } else {
            None
        };
        Ok(SolutionSample { success, state, success_probability: p, attempts: 1 })
    }

    /// Repeats independent attempts ceil(log2(1/delta)) times, stopping at
    /// the first success.
    pub fn sample_solution_state_repeated<R: Rng + ?Sized>(
        &self,
        b_prep: &UniformCircuit,
        delta: f64,
        rng: &mut R,
    ) -> Result<SolutionSample> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("delta = {delta} outside (0, 1)")));
        }
        let attempts = (1.0 / delta).log2().ceil().max(1.0) as usize;
        let mut last = None;
        for i in 0..attempts {
            let mut s = self.sample_solution_state(b_prep, rng)?;
            s.attempts = i + 1;
            if s.success {
                return Ok(s);
            }
            last = Some(s);
        }
        Ok(last.expect("at least one attempt"))
    }

    /// Median of DECISION_REPEATS entry estimates against (a + b)/2.
    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Decision> {
        let k = self.instance.data_qubits();
        let a_prep = basis_prep(k, self.instance.s)?;
        let b_prep = basis_prep(k, self.instance.t)?;
        let mut estimates = Vec::with_capacity(DECISION_REPEATS);
        let mut ancillas = 0;
        for _ in 0..DECISION_REPEATS {
            let e = self.estimate_entry(&a_prep, &b_prep, rng)?;
            ancillas = e.ancillas();
            estimates.push(e.value);
        }
        let mut sorted = estimates.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[DECISION_REPEATS / 2];
        let cut = (self.instance.a_thresh + self.instance.b_thresh) / 2.0;
        Ok(Decision { yes: median >= cut, median, estimates, ancillas })
    }

    /// Grover rotation on the full space: Pi_0 = |0^ell><0^ell| (x) |b><b|,
    /// Pi_1 = W_H^dag |0><0|_out W_H. For dense cross-checks.
    pub fn full_grover(&self, b: &[C64]) -> Result<GroverRotation> {
        let dim = crate::circuit::UnitaryOp::dim(&*self.wh);
        let pi0 = Projector::state_times_pattern(dim, b.to_vec(), (1usize << self.wh.ell()) - 1, 0)?;
        let out_bit = 1usize << self.wh.out_qubit();
        let pi1 = Projector::conjugated(Projector::pattern(dim, out_bit, 0), self.wh_handle())?;
        grover_rotation(pi0, pi1)
    }

    /// Full-space rotation for entry estimation: Pi'_1 = W_H^dag (|0><0|
    /// on flag and register, |a><a| on data) W_H.
    pub fn full_grover_entry(&self, a: &[C64], b: &[C64]) -> Result<GroverRotation> {
        let dim = crate::circuit::UnitaryOp::dim(&*self.wh);
        let pi0 = Projector::state_times_pattern(dim, b.to_vec(), (1usize << self.wh.ell()) - 1, 0)?;
        let inner_p = Projector::state_times_pattern(dim, a.to_vec(), (1usize << self.wh.ell()) - 1, 0)?;
        let pi1 = Projector::conjugated(inner_p, self.wh_handle())?;
        grover_rotation(pi0, pi1)
    }
}

/// MATINV decision with the median of repeated entry estimates.
#[derive(Clone, Debug)]
pub struct Decision {
    pub yes: bool,
    pub median: f64,
    pub estimates: Vec<f64>,
    pub ancillas: usize,
}

/// The Grover rotation restricted to its invariant plane: Pi_0 = |e0><e0|
/// and Pi_1 the line through sin(theta) e0 + cos(theta) e1, where
/// sin(theta) = overlap.
pub fn plane_rotation(overlap: f64) -> Result<GroverRotation> {
    if !(0.0..=1.0 + 1e-12).contains(&overlap) {
        return Err(Error::InvalidParameter(alloc::format!("overlap {overlap} outside [0, 1]")));
    }
    let s = overlap.min(1.0);
    let u = vec![c(s, 0.0), c((1.0 - s * s).max(0.0).sqrt(), 0.0)];
    grover_rotation(Projector::rank_one(vec![ONE, ZERO]), Projector::rank_one(u))
}

pub fn estimate_norm<R: Rng + ?Sized>(
    inst: &MatInvInstance,
    b_prep: &UniformCircuit,
    eps: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(MatInvSolver::new(inst.clone(), eps)?.estimate_norm(b_prep, rng)?.value)
}

pub fn estimate_entry<R: Rng + ?Sized>(
    inst: &MatInvInstance,
    a_prep: &UniformCircuit,
    b_prep: &UniformCircuit,
    eps: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(MatInvSolver::new(inst.clone(), eps)?.estimate_entry(a_prep, b_prep, rng)?.value)
}

pub fn sample_solution_state<R: Rng + ?Sized>(
    inst: &MatInvInstance,
    b_prep: &UniformCircuit,
    eps: f64,
    rng: &mut R,
) -> Result<(bool, Option<StateVector>)> {
    let s = MatInvSolver::new(inst.clone(), eps)?.sample_solution_state(b_prep, rng)?;
    Ok((s.success, s.state))
}

pub fn decide_matinv<R: Rng + ?Sized>(inst: &MatInvInstance, eps: f64, rng: &mut R) -> Result<bool> {
    Ok(MatInvSolver::new(inst.clone(), eps)?.decide(rng)?.yes)
}
