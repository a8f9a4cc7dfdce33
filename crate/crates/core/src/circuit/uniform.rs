use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Gate, GateKind, StateVector, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, C64};

/// Upper bound on circuit length at desk scale.
pub const MAX_GATES: usize = 100_000;

pub type GateFn = Arc<dyn Fn(usize) -> Gate + Send + Sync>;

/// Where the gates come from: a stored list or a generator indexed 1..=len.
#[derive(Clone)]
pub enum GateSource {
    List(Vec<Gate>),
    Generated { len: usize, gate_at: GateFn },
}

impl fmt::Debug for GateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSource::List(g) => f.debug_tuple("List").field(g).finish(),
            GateSource::Generated { len, .. } => f.debug_struct("Generated").field("len", len).finish(),
        }
    }
}

/// A gate sequence Q = U_T ... U_1 on `qubits` qubits with a designated
/// output qubit.
#[derive(Clone, Debug)]
pub struct UniformCircuit {
    qubits: usize,
    out: usize,
    source: GateSource,
}

impl UniformCircuit {
    pub fn new(qubits: usize, out: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self { qubits, out, source: GateSource::List(gates) };
        c.validate()?;
        Ok(c)
    }

    /// Generated circuit; gates are validated as they are applied.
    pub fn generated(qubits: usize, out: usize, len: usize, gate_at: GateFn) -> Result<Self> {
        if len > MAX_GATES {
            return Err(Error::Validation(format!("{len} gates exceeds the cap {MAX_GATES}")));
        }
        if out >= qubits.max(1) {
            return Err(Error::Validation(format!("output qubit {out} out of range")));
        }
        Ok(Self { qubits, out, source: GateSource::Generated { len, gate_at } })
    }

    fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.out >= self.qubits {
            return Err(Error::Validation(format!("output qubit {} out of range", self.out)));
        }
        if self.len() > MAX_GATES {
            return Err(Error::Validation(format!("{} gates exceeds the cap {MAX_GATES}", self.len())));
        }
        if let GateSource::List(gates) = &self.source {
            for (i, g) in gates.iter().enumerate() {
                g.validate(self.qubits)
                    .map_err(|e| Error::Validation(format!("gate {}: {e}", i + 1)))?;
            }
        }
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn out(&self) -> usize {
        self.out
    }

    pub fn source(&self) -> &GateSource {
        &self.source
    }

    /// Number of gates T.
    pub fn len(&self) -> usize {
        match &self.source {
            GateSource::List(g) => g.len(),
            GateSource::Generated { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Gate U_i for i in 1..=T.
    pub fn gate_at(&self, i: usize) -> Gate {
        assert!(i >= 1 && i <= self.len(), "gate index {i} out of 1..={}", self.len());
        match &self.source {
            GateSource::List(g) => g[i - 1].clone(),
            GateSource::Generated { gate_at, .. } => gate_at(i),
        }
    }

    pub fn gates(&self) -> impl Iterator<Item = Gate> + '_ {
        (1..=self.len()).map(move |i| self.gate_at(i))
    }

    /// Materializes a generated circuit into a gate list.
    pub fn materialize(&self) -> Result<Self> {
        Self::new(self.qubits, self.out, self.gates().collect())
    }

    /// Applies the gates in order to a raw amplitude vector.
    pub fn apply_in_place(&self, v: &mut [C64]) -> Result<()> {
        if v.len() != 1 << self.qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.qubits, got: v.len() });
        }
        let generated = matches!(self.source, GateSource::Generated { .. });
        for (i, g) in self.gates().enumerate() {
            if generated {
                g.validate(self.qubits)
                    .map_err(|e| Error::Validation(format!("gate {}: {e}", i + 1)))?;
            }
            g.apply(v);
        }
        Ok(())
    }

    pub fn simulate(&self, input: &StateVector) -> Result<StateVector> {
        if input.qubits() != self.qubits {
            return Err(Error::DimensionMismatch { expected: self.qubits, got: input.qubits() });
        }
        input.check_normalized()?;
        let mut out = input.clone();
        self.apply_in_place(out.amplitudes_mut())?;
        Ok(out)
    }

    /// Squared norm of the output projected onto out = 1.
    pub fn accept_probability(&self, input: &StateVector) -> Result<f64> {
        Ok(self.simulate(input)?.probability(self.out, true))
    }

    /// U_1^dag ... U_T^dag, reusing the output qubit.
    pub fn invert(&self) -> Self {
        let source = match &self.source {
            GateSource::List(g) => GateSource::List(g.iter().rev().map(Gate::adjoint).collect()),
            GateSource::Generated { len, gate_at } => {
                let (len, f) = (*len, gate_at.clone());
                GateSource::Generated { len, gate_at: Arc::new(move |i| f(len + 1 - i).adjoint()) }
            }
        };
        Self { qubits: self.qubits, out: self.out, source }
    }

    /// This circuit followed by `next`.
    pub fn then(&self, next: &UniformCircuit) -> Result<Self> {
        if next.qubits != self.qubits {
            return Err(Error::DimensionMismatch { expected: self.qubits, got: next.qubits });
        }
        Self::new(self.qubits, next.out, self.gates().chain(next.gates()).collect())
    }

    /// Embeds into a wider register, keeping qubit indices.
    pub fn widen(&self, qubits: usize) -> Result<Self> {
        if qubits < self.qubits {
            return Err(Error::Validation("cannot narrow a circuit".into()));
        }
        Self::new(qubits, self.out, self.gates().collect())
    }

    /// Dense unitary of the whole circuit, column j = Q|j>.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let n = 1usize << self.qubits;
        if n > crate::tolerances::dense_cap() {
            return Err(Error::Capacity { dim: n, cap: crate::tolerances::dense_cap() });
        }
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            self.apply_in_place(&mut e)?;
            cols.push(e);
        }
        Ok(DenseMatrix::from_columns(&cols))
    }

    /// Q~ on k+1 qubits: Q, CNOT(out -> k), X(k), Q^dag. Its <0^{k+1}|Q~|0^{k+1}>
    /// amplitude equals the acceptance probability of Q on |0^k>.
    pub fn make_qca_instance(&self) -> Result<Self> {
        let k = self.qubits;
        let mut gates: Vec<Gate> = self.gates().collect();
        gates.push(Gate::cnot(self.out, k));
        gates.push(Gate::x(k));
        gates.extend(self.invert().gates());
        Self::new(k + 1, self.out, gates)
    }

    /// Stable byte encoding used for provenance digests.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(b"circuit");
        b.extend_from_slice(&(self.qubits as u64).to_le_bytes());
        b.extend_from_slice(&(self.out as u64).to_le_bytes());
        for g in self.gates() {
            b.extend_from_slice(g.kind_name().as_bytes());
            for &q in g.targets.iter() {
                b.extend_from_slice(&(q as u64).to_le_bytes());
            }
            b.push(b'|');
            for &q in g.controls.iter() {
                b.extend_from_slice(&(q as u64).to_le_bytes());
            }
            let m = match &g.kind {
                GateKind::Phase(a) => {
                    b.extend_from_slice(&a.to_bits().to_le_bytes());
                    None
                }
                GateKind::GenericOneQubit(m) | GateKind::GenericTwoQubit(m) => Some(m.clone()),
                GateKind::ControlledUnitary(op) => Some(op.to_dense()),
                _ => None,
            };
            if let Some(m) = m {
                for x in m.as_slice() {
                    b.extend_from_slice(&x.re.to_bits().to_le_bytes());
                    b.extend_from_slice(&x.im.to_bits().to_le_bytes());
                }
            }
            b.push(b';');
        }
        b
    }
}

impl UnitaryOp for UniformCircuit {
    fn dim(&self) -> usize {
        1 << self.qubits
    }

    fn apply(&self, v: &mut [C64]) {
        self.apply_in_place(v).expect("circuit was validated");
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.invert().apply_in_place(v).expect("circuit was validated");
    }
}
