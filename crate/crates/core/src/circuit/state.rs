use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{is_power_of_two, norm, C64, ONE, ZERO};
use crate::tolerances;

/// Amplitudes over `qubits` qubits; qubit 0 is the low bit of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0...0>
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << qubits];
        amps[index] = ONE;
        Self { qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !is_power_of_two(amps.len()) {
            return Err(Error::Validation("state length is not a power of two".into()));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Validation("state has non-finite amplitudes".into()));
        }
        Ok(Self { qubits: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tolerances::EXACT
    }

    pub fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Validation(alloc::format!("state norm {} is not 1", self.norm())))
        }
    }

    /// Probability that `qubit` reads `value`.
    pub fn probability(&self, qubit: usize, value: bool) -> f64 {
        let bit = 1 << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & bit != 0) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// self (x) other with `self` on the low qubits.
    pub fn tensor(&self, high: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * high.dim());
        for h in &high.amps {
            for l in &self.amps {
                amps.push(l * h);
            }
        }
        StateVector { qubits: self.qubits + high.qubits, amps }
    }
}
