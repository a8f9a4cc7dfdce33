//! QMA verification: acceptance operators, the MINEIG one-bit protocol,
//! in-place gap amplification, witness removal and the composed pipeline.

mod amplify;
mod witness;

pub use amplify::{
    binomial_tail, gap_amplify_median, gap_amplify_pe, Amplification, AmplifiedVerifier, ThresholdFlip,
    MEDIAN_TRIAL_FAILURE,
};
pub use witness::{remove_witness, remove_witness_exact, WitnessFreeVerifier};

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Debug;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::circuit::{StateVector, UniformCircuit};
use crate::error::{Error, Result};
use crate::numerics::{decompose, DenseMatrix, SparseRowMatrix, SpectralDecomposition, C64, ZERO};
use crate::spectral::{one_bit_pe_circuit, EvolutionOperator};
use crate::tolerances;

/// Slack on 0 <= Q <= I.
const ACCEPTANCE_SLACK: f64 = 1e-10;

/// Anything with a witness register and an acceptance operator.
pub trait Verifier: Send + Sync + Debug {
    fn witness_qubits(&self) -> usize;

    /// Qubits besides the witness, all starting in |0>.
    fn ancilla_qubits(&self) -> usize;

    fn completeness(&self) -> f64;

    fn soundness(&self) -> f64;

    fn acceptance_operator(&self) -> Result<AcceptanceOperator>;

    /// Acceptance probability on a pure witness.
    fn accept_probability(&self, witness: &StateVector) -> Result<f64> {
        self.acceptance_operator()?.expectation(witness)
    }

    /// A gate-level realization, where one fits in memory.
    fn to_circuit(&self) -> Result<UniformCircuit>;
}

pub type VerifierHandle = Arc<dyn Verifier>;

/// Circuit verifier: witness on qubits [0, m), ancillas on [m, m + k),
/// acceptance when the circuit's output qubit reads 1.
#[derive(Clone, Debug)]
pub struct QmaVerifier {
    pub circuit: UniformCircuit,
    pub m: usize,
    pub k: usize,
    pub c: f64,
    pub s: f64,
}

impl QmaVerifier {
    pub fn new(circuit: UniformCircuit, m: usize, k: usize, c: f64, s: f64) -> Result<Self> {
        if circuit.qubits() != m + k {
            return Err(Error::DimensionMismatch { expected: m + k, got: circuit.qubits() });
        }
        if !((0.0..=1.0).contains(&c) && (0.0..=1.0).contains(&s) && c > s) {
            return Err(Error::InvalidParameter(alloc::format!("need 0 <= s < c <= 1, got c = {c}, s = {s}")));
        }
        Ok(QmaVerifier { circuit, m, k, c, s })
    }

    fn input(&self, witness: &StateVector) -> Result<StateVector> {
        if witness.qubits() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: witness.qubits() });
        }
        Ok(witness.tensor(&StateVector::zero(self.k)))
    }
}

impl Verifier for QmaVerifier {
    fn witness_qubits(&self) -> usize {
        self.m
    }

    fn ancilla_qubits(&self) -> usize {
        self.k
    }

    fn completeness(&self) -> f64 {
        self.c
    }

    fn soundness(&self) -> f64 {
        self.s
    }

    fn acceptance_operator(&self) -> Result<AcceptanceOperator> {
        acceptance_operator(self)
    }

    /// Direct simulation, independent of the acceptance operator.
    fn accept_probability(&self, witness: &StateVector) -> Result<f64> {
        self.circuit.accept_probability(&self.input(witness)?)
    }

    fn to_circuit(&self) -> Result<UniformCircuit> {
        Ok(self.circuit.clone())
    }
}

/// Q on the witness register: <psi|Q|psi> is the acceptance probability.
#[derive(Clone, Debug)]
pub struct AcceptanceOperator {
    pub q: DenseMatrix,
    spec: Arc<SpectralDecomposition>,
}

impl AcceptanceOperator {
    /// Validates Hermiticity and 0 <= Q <= I.
    pub fn new(q: DenseMatrix) -> Result<Self> {
        let spec = decompose(&q)?;
        if spec.min() < -ACCEPTANCE_SLACK || spec.max() > 1.0 + ACCEPTANCE_SLACK {
            return Err(Error::Validation(alloc::format!(
                "acceptance operator spectrum [{}, {}] leaves [0, 1]",
                spec.min(),
                spec.max()
            )));
        }
        Ok(AcceptanceOperator { q, spec: Arc::new(spec) })
    }

    /// Q = sum_i g_i |q_i><q_i| from an orthonormal basis.
    pub fn from_spectrum(values: &[f64], vectors: &[Vec<C64>]) -> Result<Self> {
        let n = vectors.first().map_or(1, |v| v.len());
        let q = DenseMatrix::from_fn(n, |i, j| {
            values.iter().zip(vectors).map(|(g, v)| v[i] * v[j].conj() * *g).sum::<C64>()
        });
        let herm = DenseMatrix::from_fn(n, |i, j| (q[(i, j)] + q[(j, i)].conj()) * 0.5);
        Self::new(herm)
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn expectation(&self, witness: &StateVector) -> Result<f64> {
        if witness.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: witness.dim() });
        }
        let v = witness.amplitudes();
        Ok(crate::numerics::inner(v, &self.q.mul_vec(v)).re)
    }

    pub fn max_acceptance(&self) -> f64 {
        self.spec.max()
    }

    pub fn min_acceptance(&self) -> f64 {
        self.spec.min()
    }

    pub fn trace(&self) -> f64 {
        self.q.trace().re
    }
}

/// Simulates the verifier on every witness basis state with zeroed
/// ancillas and projects on acceptance.
pub fn acceptance_operator(v: &QmaVerifier) -> Result<AcceptanceOperator> {
    let wdim = 1usize << v.m;
    let full = wdim << v.k;
    if wdim > tolerances::dense_cap() || full > tolerances::STATE_CAP {
        return Err(Error::Capacity { dim: full, cap: tolerances::STATE_CAP });
    }
    let out = 1usize << v.circuit.out();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(wdim);
    for j in 0..wdim {
        let mut state = vec![ZERO; full];
        state[j] = C64::new(1.0, 0.0);
        v.circuit.apply_in_place(&mut state)?;
        for (i, x) in state.iter_mut().enumerate() {
            if i & out == 0 {
                *x = ZERO;
            }
        }
        cols.push(state);
    }
    let q = DenseMatrix::from_fn(wdim, |i, j| crate::numerics::inner(&cols[i], &cols[j]));
    AcceptanceOperator::new(q)
}

/// Top eigenvector of Q and its acceptance probability.
pub fn optimal_witness(v: &dyn Verifier) -> Result<(StateVector, f64)> {
    let q = v.acceptance_operator()?;
    let spec = q.decomposition();
    let i = spec.dim() - 1;
    Ok((StateVector::from_amplitudes(spec.eigenvectors[i].clone())?, spec.eigenvalues[i]))
}

/// Minimum-eigenvalue promise problem: lambda_min <= a or >= b.
#[derive(Clone, Debug)]
pub struct MinEigInstance {
    pub h: SparseRowMatrix,
    pub a: f64,
    pub b: f64,
    /// Declared bound on max |H_ij|.
    pub max_entry: f64,
}

impl MinEigInstance {
    pub fn new(h: SparseRowMatrix, a: f64, b: f64) -> Result<Self> {
        let bound = h.hmax();
        Self::with_entry_bound(h, a, b, bound)
    }

    pub fn with_entry_bound(h: SparseRowMatrix, a: f64, b: f64, max_entry: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(alloc::format!("need a < b, got ({a}, {b})")));
        }
        if h.hmax() > max_entry {
            return Err(Error::InvalidInstance(alloc::format!(
                "max entry {} exceeds declared bound {max_entry}",
                h.hmax()
            )));
        }
        Ok(MinEigInstance { h, a, b, max_entry })
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(decompose(&self.h)?.min())
    }

    pub fn oracle_decision(&self) -> Result<bool> {
        let spec = decompose(&self.h)?;
        let l = spec.min();
        // eigensolver rounding must not turn an exact threshold hit into a violation
        let slack = tolerances::PROMISE * spec.norm().max(1.0);
        if l <= self.a + slack {
            Ok(true)
        } else if l >= self.b - slack {
            Ok(false)
        } else {
            Err(Error::PromiseViolation(alloc::format!(
                "lambda_min = {l} lies strictly between {} and {}",
                self.a,
                self.b
            )))
        }
    }
}

/// Hamiltonian-simulation mode for the protocol's exp(-iHt).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HamSim {
    Exact,
    /// Operator-norm error `epsilon`, realized from `seed`.
    Injected { epsilon: f64, seed: u64 },
}

impl HamSim {
    pub fn epsilon(&self) -> f64 {
        match self {
            HamSim::Exact => 0.0,
            HamSim::Injected { epsilon, .. } => *epsilon,
        }
    }
}

/// t = pi / (d_max * max |H_ij|), or pi for the zero matrix.
pub fn protocol_time(h: &SparseRowMatrix) -> f64 {
    let bound = h.gershgorin_bound();
    if bound == 0.0 {
        PI
    } else {
        PI / bound
    }
}

pub fn mineig_protocol(inst: &MinEigInstance, hamsim: HamSim) -> Result<QmaVerifier> {
    mineig_protocol_with_time(inst, protocol_time(&inst.h), hamsim)
}

/// One-bit phase estimation of exp(-iHt) on the witness; acceptance on
/// an eigenstate with eigenvalue lambda is (1 + cos(lambda t))/2.
pub fn mineig_protocol_with_time(inst: &MinEigInstance, t: f64, hamsim: HamSim) -> Result<QmaVerifier> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("time {t} must be positive")));
    }
    let spec = Arc::new(decompose(&inst.h)?);
    let scale = spec.norm().max(f64::MIN_POSITIVE);
    if spec.min() < -tolerances::PSD_CLAMP * scale.max(1.0) {
        return Err(Error::NotPsd { min: spec.min() });
    }
    if spec.max() * t > PI * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(alloc::format!(
            "spectrum of Ht reaches {} > pi",
            spec.max() * t
        )));
    }
    let eps = hamsim.epsilon();
    if eps > (inst.b - inst.a) * t / 16.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "simulation error {eps} exceeds (b - a) t / 16 = {}",
            (inst.b - inst.a) * t / 16.0
        )));
    }
    let seed = match hamsim {
        HamSim::Exact => 0,
        HamSim::Injected { seed, .. } => seed,
    };
    let evo = EvolutionOperator::from_parts(inst.h.clone(), spec, t, eps, seed)?;
    let circuit = one_bit_pe_circuit(Arc::new(evo))?;
    let c = (1.0 + (inst.a.max(0.0) * t).cos()) / 2.0 - eps;
    let s = (1.0 + (inst.b * t).min(PI).cos()) / 2.0 + eps;
    QmaVerifier::new(circuit, inst.h.qubits(), 1, c.clamp(0.0, 1.0), s.clamp(0.0, 1.0))
}

/// Everything the composed MINEIG pipeline produced.
#[derive(Clone, Debug)]
pub struct MinEigReport {
    pub yes: bool,
    pub t: f64,
    pub epsilon: f64,
    /// (c, s) of the protocol, after the first amplification, after
    /// witness removal and after the final amplification.
    pub ladder: [(f64, f64); 4],
    /// Acceptance of the classical optimal witness by the protocol and by
    /// the amplified protocol.
    pub optimal_witness_acceptance: (f64, f64),
    pub witness_free_acceptance: f64,
    pub final_acceptance: f64,
    pub ancillas: usize,
}

/// Protocol, amplification with r = m + 2, witness removal, amplification
/// with r = 3; YES iff the final acceptance is at least 1/2.
pub fn decide_mineig(inst: &MinEigInstance, hamsim: HamSim) -> Result<MinEigReport> {
    let t = protocol_time(&inst.h);
    let v0 = Arc::new(mineig_protocol_with_time(inst, t, hamsim)?);
    let m = v0.m;
    let v1 = Arc::new(gap_amplify_pe(v0.clone(), m + 2)?);
    let (witness, acc0) = optimal_witness(&*v0)?;
    let acc1 = v1.accept_probability(&witness)?;
    let w = Arc::new(remove_witness_exact(v1.clone())?);
    let v2 = gap_amplify_pe(w.clone(), 3)?;
    let final_acceptance = v2.acceptance_operator()?.q[(0, 0)].re;
    Ok(MinEigReport {
        yes: final_acceptance >= 0.5,
        t,
        epsilon: hamsim.epsilon(),
        ladder: [
            (v0.c, v0.s),
            (v1.completeness(), v1.soundness()),
            (w.completeness(), w.soundness()),
            (v2.completeness(), v2.soundness()),
        ],
        optimal_witness_acceptance: (acc0, acc1),
        witness_free_acceptance: w.acceptance(),
        final_acceptance,
        ancillas: v0.k + v1.overhead() + m + v2.overhead(),
    })
}

/// Verifier on m witness qubits and one ancilla (the output, qubit m) with
/// Q = W^dag diag(acceptances) W for a random unitary W: W acts on the
/// witness, then witness pattern j rotates the output to accept with
/// probability acceptances[j].
pub fn toy_verifier<R: rand::Rng + ?Sized>(
    m: usize,
    acceptances: &[f64],
    c: f64,
    s: f64,
    rng: &mut R,
) -> Result<QmaVerifier> {
    use crate::circuit::{DenseOp, Gate};
    if acceptances.len() != 1 << m || acceptances.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter("need 2^m acceptances in [0, 1]".into()));
    }
    let witness: Vec<usize> = (0..m).collect();
    let mut gates = Vec::new();
    if m > 0 {
        let w = crate::numerics::random::random_unitary(1 << m, rng);
        gates.push(Gate::controlled(Arc::new(DenseOp::new(w)?), witness.clone(), vec![]));
    }
    for (j, p) in acceptances.iter().enumerate() {
        let flips: Vec<usize> = (0..m).filter(|q| j >> q & 1 == 0).collect();
        gates.extend(flips.iter().map(|&q| Gate::x(q)));
        let (sn, cs) = (p.sqrt(), (1.0 - p).sqrt());
        let ry = DenseMatrix::from_row_major(
            2,
            vec![C64::new(cs, 0.0), C64::new(-sn, 0.0), C64::new(sn, 0.0), C64::new(cs, 0.0)],
        )?;
        gates.push(Gate::one_qubit(m, ry).with_controls(witness.clone()));
        gates.extend(flips.iter().map(|&q| Gate::x(q)));
    }
    QmaVerifier::new(UniformCircuit::new(m + 1, m, gates)?, m, 1, c, s)
}
