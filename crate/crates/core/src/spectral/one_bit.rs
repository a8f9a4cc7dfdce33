use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::EvolutionOperator;
use crate::circuit::{Gate, OpHandle, StateVector, UniformCircuit};
use crate::error::{Error, Result};
use crate::numerics::SparseRowMatrix;

/// Circuit on m+1 qubits (control at qubit m): H, controlled-U on the
/// witness register, H, X. The output qubit is the control, so acceptance
/// equals the probability that the control would have read 0.
pub fn one_bit_pe_circuit(evolution: OpHandle) -> Result<UniformCircuit> {
    let m = crate::numerics::log2_exact(evolution.dim())
        .ok_or_else(|| Error::Validation("evolution dimension is not a power of two".into()))?;
    let targets: Vec<usize> = (0..m).collect();
    UniformCircuit::new(
        m + 1,
        m,
        vec![Gate::h(m), Gate::controlled(evolution, targets, vec![m]), Gate::h(m), Gate::x(m)],
    )
}

/// Probability of reading the control as 0 after one-bit phase estimation
/// of exp(-iHt) on `witness`, in exact-evolution mode.
pub fn one_bit_pe(h: &SparseRowMatrix, t: f64, witness: &StateVector) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidParameter(alloc::format!("time {t} must be positive")));
    }
    one_bit_pe_with(Arc::new(EvolutionOperator::exact(h, t)?), witness)
}

/// As `one_bit_pe` with any evolution handle (e.g. error-injected).
pub fn one_bit_pe_with(evolution: OpHandle, witness: &StateVector) -> Result<f64> {
    let circuit = one_bit_pe_circuit(evolution)?;
    let input = witness.tensor(&StateVector::zero(1));
    circuit.accept_probability(&input)
}
