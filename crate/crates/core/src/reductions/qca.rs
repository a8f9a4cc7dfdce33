use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::{digest, ArtifactMeta, ReductionArtifact, ReductionKind, Thresholds};
use crate::circuit::{Gate, StateVector, UniformCircuit, UnitaryOp};
use crate::error::{Error, Result};
use crate::matinv::MatInvInstance;
use crate::numerics::{SparseRowMatrix, C64, ZERO};
use crate::tolerances;

/// Cyclic clock unitary on 3T positions times the 2^k circuit space.
/// Position p holds clock value p + 1. Each step moves p to p + 1 mod 3T:
/// p < T applies gate p + 1, T <= p < 2T idles, and 2T <= p < 3T applies
/// the inverse of gate 3T - p. So U^t |1>|psi> = |t+1> Q|psi> for
/// t in [T, 2T] and U^{3T} = I.
#[derive(Clone, Debug)]
pub struct CycleUnitary {
    gates: Vec<Gate>,
    qubits: usize,
}

impl CycleUnitary {
    pub fn new(circuit: &UniformCircuit) -> Result<Self> {
        if circuit.is_empty() {
            return Err(Error::InvalidParameter("circuit has no gates".into()));
        }
        Ok(CycleUnitary { gates: circuit.gates().collect(), qubits: circuit.qubits() })
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn positions(&self) -> usize {
        3 * self.gates.len()
    }

    pub fn block(&self) -> usize {
        1 << self.qubits
    }

    /// Gate applied when leaving position p; None while idling.
    pub fn step(&self, p: usize) -> Option<Gate> {
        let t = self.gates.len();
        if p < t {
            Some(self.gates[p].clone())
        } else if p < 2 * t {
            None
        } else {
            Some(self.gates[3 * t - p - 1].adjoint())
        }
    }

    /// Nonzero entries of column (p, x) as (row index, value).
    pub fn column(&self, p: usize, x: usize) -> Vec<(usize, C64)> {
        let b = self.block();
        let next = (p + 1) % self.positions();
        match self.step(p) {
            None => alloc::vec![(next * b + x, C64::new(1.0, 0.0))],
            Some(g) => g.column(x).into_iter().map(|(y, v)| (next * b + y, v)).collect(),
        }
    }
}

impl UnitaryOp for CycleUnitary {
    fn dim(&self) -> usize {
        self.positions() * self.block()
    }

    fn apply(&self, v: &mut [C64]) {
        let b = self.block();
        let n = self.positions();
        let mut out = alloc::vec![ZERO; v.len()];
        for p in 0..n {
            let mut chunk = v[p * b..(p + 1) * b].to_vec();
            if let Some(g) = self.step(p) {
                g.apply(&mut chunk);
            }
            let q = (p + 1) % n;
            out[q * b..(q + 1) * b].copy_from_slice(&chunk);
        }
        v.copy_from_slice(&out);
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        let b = self.block();
        let n = self.positions();
        let mut out = alloc::vec![ZERO; v.len()];
        for p in 0..n {
            let q = (p + 1) % n;
            let mut chunk = v[q * b..(q + 1) * b].to_vec();
            if let Some(g) = self.step(p) {
                g.adjoint().apply(&mut chunk);
            }
            out[p * b..(p + 1) * b].copy_from_slice(&chunk);
        }
        v.copy_from_slice(&out);
    }
}

/// floor(3T/2), the middle of the valid window [T, 2T].
pub fn default_clock_offset(gates: usize) -> usize {
    3 * gates / 2
}

/// (1 + e^{-1/T}) / (1 - e^{-1/T}): the largest over the smallest singular
/// value of I - U e^{-1/T} when U has eigenvalue -1, which happens for even T.
pub fn qca_kappa_bound(gates: usize) -> f64 {
    let r = (-1.0 / gates as f64).exp();
    (1.0 + r) / (1.0 - r)
}

/// e^{-t/T}/(1 - e^{-3}) <0^k|Q|0^k>, with the amplitude from direct simulation.
pub fn qca_entry_formula(circuit: &UniformCircuit, offset: usize) -> Result<C64> {
    let t = circuit.len() as f64;
    let out = circuit.simulate(&StateVector::zero(circuit.qubits()))?;
    let amp = out.amplitudes()[0];
    Ok(amp * ((-(offset as f64) / t).exp() / (1.0 - (-3.0f64).exp())))
}

pub fn qca_to_matinv(circuit: &UniformCircuit) -> Result<ReductionArtifact> {
    qca_to_matinv_with_offset(circuit, default_clock_offset(circuit.len()))
}

/// H = [[0, I - U e^{-1/T}], [I - U^dag e^{-1/T}, 0]] on 6T 2^k indices,
/// padded with ones on the diagonal up to a power of two. The designated
/// entry is row 3T 2^k + offset 2^k (clock value offset + 1 in the lower
/// half), column 0 (clock value 1), both with data |0^k>.
pub fn qca_to_matinv_with_offset(circuit: &UniformCircuit, offset: usize) -> Result<ReductionArtifact> {
    let cycle = CycleUnitary::new(circuit)?;
    let t = cycle.gate_count();
    if offset < t || offset > 2 * t {
        return Err(Error::InvalidParameter(alloc::format!("clock offset {offset} outside [{t}, {}]", 2 * t)));
    }
    let half = cycle.dim();
    let dim = (2 * half).next_power_of_two();
    if dim > tolerances::dense_cap() {
        return Err(Error::Capacity { dim, cap: tolerances::dense_cap() });
    }
    let r = (-1.0 / t as f64).exp();
    let b = cycle.block();
    // upper-right block A = I - r U, stored with its mirror
    let mut upper = Vec::with_capacity(half * 4);
    for p in 0..cycle.positions() {
        for x in 0..b {
            let col = p * b + x;
            upper.push((col, half + col, C64::new(1.0, 0.0)));
            for (row, v) in cycle.column(p, x) {
                upper.push((row, half + col, -v * r));
            }
        }
    }
    for i in 2 * half..dim {
        upper.push((i, i, C64::new(1.0, 0.0)));
    }
    let matrix = SparseRowMatrix::from_upper(dim, &upper)?;
    let scale = (-(offset as f64) / t as f64).exp() / (1.0 - (-3.0f64).exp());
    Ok(ReductionArtifact {
        matrix,
        kind: ReductionKind::QcaMatinv,
        thresholds: Thresholds::MatInv { s: half + offset * b, t: 0, a: scale / 3.0, b: 2.0 * scale / 3.0 },
        provenance: digest(&circuit.canonical_bytes()),
        meta: ArtifactMeta {
            gates: Some(t),
            qubits: Some(circuit.qubits()),
            clock_offset: Some(offset),
            kappa: Some(qca_kappa_bound(t)),
            walk: None,
        },
    })
}

/// The artifact as a matrix-inversion instance: H / (1 + e^{-1/T}) so the
/// spectrum lies in [-1, 1], with the entry thresholds scaled to match.
pub fn to_matinv_instance(art: &ReductionArtifact) -> Result<MatInvInstance> {
    let (Thresholds::MatInv { s, t, a, b }, Some(gates), Some(kappa)) = (art.thresholds, art.meta.gates, art.meta.kappa)
    else {
        return Err(Error::InvalidInstance("artifact is not a qca-matinv reduction".into()));
    };
    let norm = 1.0 + (-1.0 / gates as f64).exp();
    MatInvInstance::new_indefinite(art.matrix.scaled(1.0 / norm), kappa, s, t, a * norm, b * norm)
}
