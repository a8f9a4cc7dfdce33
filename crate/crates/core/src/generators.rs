//! Seeded instance generators shared by tests, the acceptance suite and
//! the corpus runner.

use alloc::vec::Vec;
use rand::Rng;

use crate::circuit::{Gate, StateVector, UniformCircuit};
use crate::error::Result;
use crate::numerics::random::{hermitian_with_spectrum, random_unitary};
use crate::numerics::SparseRowMatrix;
use crate::qma::QmaVerifier;

/// PSD matrix with spectrum in [1/kappa, 1], both endpoints attained.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, kappa: f64, rng: &mut R) -> Result<SparseRowMatrix> {
    let mut spec: Vec<f64> = (0..dim).map(|_| rng.random_range(1.0 / kappa..=1.0)).collect();
    spec[0] = 1.0 / kappa;
    if dim > 1 {
        spec[1] = 1.0;
    }
    SparseRowMatrix::from_dense(&hermitian_with_spectrum(&spec, rng), 0.0)
}

/// Random generic one- and two-qubit gates (two-qubit only when qubits >= 2).
pub fn random_circuit<R: Rng + ?Sized>(qubits: usize, gates: usize, out: usize, rng: &mut R) -> Result<UniformCircuit> {
    let list = (0..gates)
        .map(|_| {
            if qubits >= 2 && rng.random_bool(0.5) {
                let a = rng.random_range(0..qubits);
                let mut b = rng.random_range(0..qubits - 1);
                if b >= a {
                    b += 1;
                }
                Gate::two_qubit(a, b, random_unitary(4, rng))
            } else {
                Gate::one_qubit(rng.random_range(0..qubits), random_unitary(2, rng))
            }
        })
        .collect();
    UniformCircuit::new(qubits, out, list)
}

/// Random X / CNOT / Toffoli gates on the given qubits.
pub fn random_classical_gates<R: Rng + ?Sized>(on: &[usize], gates: usize, rng: &mut R) -> Vec<Gate> {
    (0..gates)
        .map(|_| {
            let mut pick = on.to_vec();
            for i in (1..pick.len()).rev() {
                let j = rng.random_range(0..=i);
                pick.swap(i, j);
            }
            match rng.random_range(0..3.min(on.len())) {
                0 => Gate::x(pick[0]),
                1 => Gate::cnot(pick[1], pick[0]),
                _ => Gate::toffoli(pick[1], pick[2], pick[0]),
            }
        })
        .collect()
}

/// Deterministic classical verifier with c = 1, s = 0 on m witness and k
/// ancilla qubits, output on the top qubit. A YES verifier computes C,
/// copies a work bit that C sets on some witness to the output (or flips
/// the output when none is set) and undoes C. A NO verifier runs C then its inverse,
/// so the output is never set. Both have 2g + (1 for YES) gates.
pub fn deterministic_verifier<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    g: usize,
    yes: bool,
    rng: &mut R,
) -> Result<QmaVerifier> {
    assert!(k >= 1 && m + k >= 2, "need an output ancilla and one work qubit");
    let n = m + k;
    let out = n - 1;
    let work: Vec<usize> = (0..n - 1).collect();
    let c = random_classical_gates(&work, g, rng);
    let mut gates = c.clone();
    if yes {
        // copy a work bit that C sets to 1 on some witness, else flip out directly
        let probe = UniformCircuit::new(n, out, c.clone())?;
        let mut ones = Vec::new();
        for x in 0..1usize << m {
            let y = probe.simulate(&StateVector::basis(n, x))?;
            let idx = y.amplitudes().iter().position(|a| a.norm() > 0.5).unwrap_or(0);
            ones.extend(work.iter().copied().filter(|q| idx >> q & 1 == 1));
        }
        ones.sort_unstable();
        ones.dedup();
        if ones.is_empty() {
            gates.push(Gate::x(out));
        } else {
            gates.push(Gate::cnot(ones[rng.random_range(0..ones.len())], out));
        }
    }
    gates.extend(c.iter().rev().map(|g| g.adjoint()));
    QmaVerifier::new(UniformCircuit::new(n, out, gates)?, m, k, 1.0, 0.0)
}
