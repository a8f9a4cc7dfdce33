use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use super::op::{AdjointOp, OpHandle};
use crate::error::{Error, Result};
use crate::numerics::{cis, DenseMatrix, C64, ZERO};
use crate::tolerances;

#[derive(Clone, Debug)]
pub enum GateKind {
    Hadamard,
    X,
    /// diag(1, e^{i angle})
    Phase(f64),
    /// Arbitrary operator on `targets`, target i on bit i of its index.
    ControlledUnitary(OpHandle),
    GenericOneQubit(DenseMatrix),
    /// 4x4 unitary; `targets[0]` is the low bit of the matrix index.
    GenericTwoQubit(DenseMatrix),
}

/// A gate with explicit targets and (all-ones) controls. CNOT is `X` with
/// one control and Toffoli is `X` with two.
#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<usize>) -> Self {
        Self { kind, targets, controls }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::Hadamard, vec![q], vec![])
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], vec![])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::X, vec![target], vec![control])
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::new(GateKind::X, vec![target], vec![c1, c2])
    }

    pub fn phase(q: usize, angle: f64) -> Self {
        Self::new(GateKind::Phase(angle), vec![q], vec![])
    }

    pub fn controlled_phase(control: usize, target: usize, angle: f64) -> Self {
        Self::new(GateKind::Phase(angle), vec![target], vec![control])
    }

    pub fn one_qubit(q: usize, m: DenseMatrix) -> Self {
        Self::new(GateKind::GenericOneQubit(m), vec![q], vec![])
    }

    pub fn two_qubit(q0: usize, q1: usize, m: DenseMatrix) -> Self {
        Self::new(GateKind::GenericTwoQubit(m), vec![q0, q1], vec![])
    }

    pub fn controlled(op: OpHandle, targets: Vec<usize>, controls: Vec<usize>) -> Self {
        Self::new(GateKind::ControlledUnitary(op), targets, controls)
    }

    pub fn with_controls(mut self, controls: Vec<usize>) -> Self {
        self.controls = controls;
        self
    }

    /// Checks arity, index ranges, disjointness and unitarity.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        let arity = match &self.kind {
            GateKind::Hadamard | GateKind::X | GateKind::Phase(_) | GateKind::GenericOneQubit(_) => 1,
            GateKind::GenericTwoQubit(_) => 2,
            GateKind::ControlledUnitary(op) => {
                if !crate::numerics::is_power_of_two(op.dim()) {
                    return Err(Error::Validation("controlled operator dimension is not a power of two".into()));
                }
                op.qubits()
            }
        };
        if self.targets.len() != arity {
            return Err(Error::Validation(format!(
                "gate expects {arity} targets, got {}",
                self.targets.len()
            )));
        }
        let mut seen = vec![false; qubits];
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= qubits {
                return Err(Error::Validation(format!("qubit {q} out of range for {qubits} qubits")));
            }
            if seen[q] {
                return Err(Error::Validation(format!("qubit {q} used twice in one gate")));
            }
            seen[q] = true;
        }
        match &self.kind {
            GateKind::GenericOneQubit(m) | GateKind::GenericTwoQubit(m) => {
                if m.dim() != 1 << arity {
                    return Err(Error::Validation("gate matrix has the wrong size".into()));
                }
                if !m.is_finite() {
                    return Err(Error::Validation("gate matrix has non-finite entries".into()));
                }
                let dev = m.unitarity_defect();
                if dev > tolerances::GATE_UNITARY {
                    return Err(Error::NonUnitary { deviation: dev });
                }
            }
            GateKind::Phase(a) if !a.is_finite() => {
                return Err(Error::Validation("phase angle is not finite".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Hadamard => GateKind::Hadamard,
            GateKind::X => GateKind::X,
            GateKind::Phase(a) => GateKind::Phase(-a),
            GateKind::GenericOneQubit(m) => GateKind::GenericOneQubit(m.adjoint()),
            GateKind::GenericTwoQubit(m) => GateKind::GenericTwoQubit(m.adjoint()),
            GateKind::ControlledUnitary(op) => GateKind::ControlledUnitary(Arc::new(AdjointOp(op.clone()))),
        };
        Self { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Matrix of the gate on its targets, ignoring controls.
    pub fn target_matrix(&self) -> DenseMatrix {
        let s = FRAC_1_SQRT_2;
        match &self.kind {
            GateKind::Hadamard => DenseMatrix::from_fn(2, |i, j| {
                C64::new(if i == 1 && j == 1 { -s } else { s }, 0.0)
            }),
            GateKind::X => DenseMatrix::from_fn(2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0)),
            GateKind::Phase(a) => DenseMatrix::diagonal(&[C64::new(1.0, 0.0), cis(*a)]),
            GateKind::GenericOneQubit(m) | GateKind::GenericTwoQubit(m) => m.clone(),
            GateKind::ControlledUnitary(op) => op.to_dense(),
        }
    }

    fn masks(&self) -> (usize, usize, Vec<usize>) {
        let cmask = self.controls.iter().fold(0, |m, &q| m | (1 << q));
        let tmask = self.targets.iter().fold(0, |m, &q| m | (1 << q));
        let sub = 1usize << self.targets.len();
        let offsets = (0..sub)
            .map(|s| {
                self.targets
                    .iter()
                    .enumerate()
                    .fold(0, |o, (i, &q)| if s >> i & 1 == 1 { o | (1 << q) } else { o })
            })
            .collect();
        (cmask, tmask, offsets)
    }

    /// Applies the gate to a full register of amplitudes.
    pub fn apply(&self, v: &mut [C64]) {
        let (cmask, tmask, offsets) = self.masks();
        match &self.kind {
            GateKind::X => {
                let o = offsets[1];
                for base in 0..v.len() {
                    if base & tmask == 0 && base & cmask == cmask {
                        v.swap(base, base | o);
                    }
                }
            }
            GateKind::Hadamard => {
                let o = offsets[1];
                let s = FRAC_1_SQRT_2;
                for base in 0..v.len() {
                    if base & tmask == 0 && base & cmask == cmask {
                        let (a, b) = (v[base], v[base | o]);
                        v[base] = (a + b) * s;
                        v[base | o] = (a - b) * s;
                    }
                }
            }
            GateKind::Phase(a) => {
                let o = offsets[1];
                let ph = cis(*a);
                for base in 0..v.len() {
                    if base & tmask == 0 && base & cmask == cmask {
                        v[base | o] *= ph;
                    }
                }
            }
            GateKind::GenericOneQubit(m) | GateKind::GenericTwoQubit(m) => {
                let mut buf = vec![ZERO; offsets.len()];
                for base in 0..v.len() {
                    if base & tmask == 0 && base & cmask == cmask {
                        for (b, o) in buf.iter_mut().zip(&offsets) {
                            *b = v[base | o];
                        }
                        for (i, o) in offsets.iter().enumerate() {
                            v[base | o] = m.row(i).iter().zip(&buf).map(|(x, y)| x * y).sum();
                        }
                    }
                }
            }
            GateKind::ControlledUnitary(op) => {
                let mut buf = vec![ZERO; offsets.len()];
                for base in 0..v.len() {
                    if base & tmask == 0 && base & cmask == cmask {
                        for (b, o) in buf.iter_mut().zip(&offsets) {
                            *b = v[base | o];
                        }
                        op.apply(&mut buf);
                        for (b, o) in buf.iter().zip(&offsets) {
                            v[base | o] = *b;
                        }
                    }
                }
            }
        }
    }

    /// Nonzero entries of column `x` of the full-register matrix.
    pub fn column(&self, x: usize) -> Vec<(usize, C64)> {
        let (cmask, tmask, offsets) = self.masks();
        if x & cmask != cmask {
            return vec![(x, C64::new(1.0, 0.0))];
        }
        let base = x & !tmask;
        let sub = offsets.iter().position(|&o| base | o == x).expect("x decomposes over targets");
        let m = self.target_matrix();
        offsets
            .iter()
            .enumerate()
            .filter_map(|(i, &o)| {
                let a = m[(i, sub)];
                (a != ZERO).then_some((base | o, a))
            })
            .collect()
    }

    /// Short name used by the circuit file format.
    pub fn kind_name(&self) -> &'static str {
        match (&self.kind, self.controls.len()) {
            (GateKind::Hadamard, _) => "h",
            (GateKind::X, 0) => "x",
            (GateKind::X, 1) => "cnot",
            (GateKind::X, 2) => "toffoli",
            (GateKind::X, _) => "mcx",
            (GateKind::Phase(_), _) => "phase",
            (GateKind::GenericOneQubit(_), _) => "u1",
            (GateKind::GenericTwoQubit(_), _) => "u2",
            (GateKind::ControlledUnitary(_), _) => "unitary",
        }
    }
}
