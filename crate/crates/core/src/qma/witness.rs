use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::{AcceptanceOperator, Verifier, VerifierHandle};
use crate::circuit::{Gate, UniformCircuit};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, C64};

fn check_amplified(v: &dyn Verifier) -> Result<()> {
    let m = v.witness_qubits();
    let bound = 0.5f64.powi(m as i32 + 2);
    if v.completeness() < 1.0 - bound || v.soundness() > bound {
        return Err(Error::InvalidParameter(alloc::format!(
            "witness removal needs c >= 1 - 2^-(m+2) and s <= 2^-(m+2) with m = {m}, got c = {}, s = {}",
            v.completeness(),
            v.soundness()
        )));
    }
    Ok(())
}

/// Witness-free circuit: m reference qubits are appended above the
/// verifier, each is put in an EPR pair with one witness qubit, and the
/// verifier runs on the witness halves. The witness register then holds
/// the maximally mixed state, so acceptance is 2^-m tr(Q).
pub fn remove_witness(v: &dyn Verifier) -> Result<UniformCircuit> {
    check_amplified(v)?;
    let circuit = v.to_circuit()?;
    let m = v.witness_qubits();
    let n = circuit.qubits();
    let mut gates = Vec::with_capacity(2 * m + circuit.len());
    for j in 0..m {
        gates.push(Gate::h(n + j));
        gates.push(Gate::cnot(n + j, j));
    }
    gates.extend(circuit.gates());
    UniformCircuit::new(n + m, circuit.out(), gates)
}

/// The same computation evaluated exactly as 2^-m tr(Q).
pub fn remove_witness_exact(v: VerifierHandle) -> Result<WitnessFreeVerifier> {
    check_amplified(&*v)?;
    let q = v.acceptance_operator()?;
    let m = v.witness_qubits();
    let acceptance = q.trace() / (1usize << m) as f64;
    Ok(WitnessFreeVerifier { base: v, acceptance })
}

/// Verifier without a witness whose acceptance is the base verifier's
/// acceptance on the maximally mixed witness.
#[derive(Clone, Debug)]
pub struct WitnessFreeVerifier {
    base: VerifierHandle,
    acceptance: f64,
}

impl WitnessFreeVerifier {
    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    pub fn removed_qubits(&self) -> usize {
        self.base.witness_qubits()
    }
}

impl Verifier for WitnessFreeVerifier {
    fn witness_qubits(&self) -> usize {
        0
    }

    fn ancilla_qubits(&self) -> usize {
        self.base.ancilla_qubits() + 2 * self.base.witness_qubits()
    }

    fn completeness(&self) -> f64 {
        0.75 * 0.5f64.powi(self.removed_qubits() as i32)
    }

    fn soundness(&self) -> f64 {
        0.25 * 0.5f64.powi(self.removed_qubits() as i32)
    }

    fn acceptance_operator(&self) -> Result<AcceptanceOperator> {
        AcceptanceOperator::new(DenseMatrix::from_fn(1, |_, _| C64::new(self.acceptance.clamp(0.0, 1.0), 0.0)))
    }

    fn to_circuit(&self) -> Result<UniformCircuit> {
        remove_witness(&*self.base)
    }
}
