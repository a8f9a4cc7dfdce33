use alloc::vec;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::{digest, ArtifactMeta, ReductionArtifact, ReductionKind, Thresholds};
use crate::circuit::{Gate, StateVector, UniformCircuit};
use crate::error::{Error, Result};
use crate::numerics::{RowOracle, SparseRowMatrix, C64};
use crate::qma::QmaVerifier;
use crate::tolerances;

/// Row x of a gate's full matrix, read off the columns that can reach x so
/// that the values are bit-identical to the column entries.
pub fn gate_row(g: &Gate, x: usize) -> Vec<(usize, C64)> {
    let cmask: usize = g.controls.iter().map(|q| 1usize << q).sum();
    if x & cmask != cmask {
        return vec![(x, C64::new(1.0, 0.0))];
    }
    let tmask: usize = g.targets.iter().map(|q| 1usize << q).sum();
    let base = x & !tmask;
    let mut row = Vec::new();
    let mut sub = tmask;
    loop {
        let xp = base | sub;
        if let Some(&(_, v)) = g.column(xp).iter().find(|(y, _)| *y == x) {
            row.push((xp, v));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & tmask;
    }
    row.sort_by_key(|(j, _)| *j);
    row
}

/// Streams the rows of H = H_in + H_prop + H_out on (2^n data) x (clock
/// padded to P >= T + 1), index x + 2^n tau. Witness on qubits [0, m),
/// ancillas [m, n). Padding clock values carry a unit penalty.
#[derive(Clone, Debug)]
pub struct ClockRows {
    gates: Vec<Gate>,
    qubits: usize,
    witness: usize,
    out: usize,
    clock: usize,
}

impl ClockRows {
    pub fn new(circuit: &UniformCircuit, witness: usize) -> Result<Self> {
        if circuit.is_empty() {
            return Err(Error::InvalidParameter("circuit has no gates".into()));
        }
        if witness > circuit.qubits() {
            return Err(Error::DimensionMismatch { expected: circuit.qubits(), got: witness });
        }
        let t = circuit.len();
        Ok(ClockRows {
            gates: circuit.gates().collect(),
            qubits: circuit.qubits(),
            witness,
            out: circuit.out(),
            clock: (t + 1).next_power_of_two(),
        })
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn clock_dim(&self) -> usize {
        self.clock
    }

    fn split(&self, i: usize) -> (usize, usize) {
        (i & ((1 << self.qubits) - 1), i >> self.qubits)
    }

    fn index(&self, x: usize, tau: usize) -> usize {
        x | tau << self.qubits
    }

    /// H_in: ancillas not all zero at clock 0.
    pub fn in_penalty(&self, x: usize, tau: usize) -> f64 {
        if tau == 0 && x >> self.witness != 0 {
            1.0
        } else {
            0.0
        }
    }

    /// H_out: rejecting outcome (out = 0) at clock T.
    pub fn out_penalty(&self, x: usize, tau: usize) -> f64 {
        if tau == self.gates.len() && x >> self.out & 1 == 0 {
            1.0
        } else {
            0.0
        }
    }

    /// Row of H_prop (without padding).
    pub fn prop_row(&self, i: usize) -> Vec<(usize, C64)> {
        let t = self.gates.len();
        let (x, tau) = self.split(i);
        if tau > t {
            return Vec::new();
        }
        let mut row = Vec::new();
        let mut diag = 0.0;
        if tau >= 1 {
            // -1/2 V_tau (x) |tau><tau-1|
            diag += 0.5;
            for (xp, v) in gate_row(&self.gates[tau - 1], x) {
                row.push((self.index(xp, tau - 1), -v * 0.5));
            }
        }
        if tau < t {
            // -1/2 V_{tau+1}^dag (x) |tau><tau+1|
            diag += 0.5;
            for (y, v) in self.gates[tau].column(x) {
                row.push((self.index(y, tau + 1), -v.conj() * 0.5));
            }
        }
        row.push((i, C64::new(diag, 0.0)));
        row.sort_by_key(|(j, _)| *j);
        row
    }
}

impl RowOracle for ClockRows {
    fn dim(&self) -> usize {
        self.clock << self.qubits
    }

    fn row(&self, i: usize) -> Vec<(usize, C64)> {
        let (x, tau) = self.split(i);
        if tau > self.gates.len() {
            return vec![(i, C64::new(1.0, 0.0))];
        }
        let mut row = self.prop_row(i);
        let extra = self.in_penalty(x, tau) + self.out_penalty(x, tau);
        if let Some(d) = row.iter_mut().find(|(j, _)| *j == i) {
            d.1 += C64::new(extra, 0.0);
        }
        row
    }
}

/// Clock Hamiltonian with its three parts kept separately. The padding
/// penalty is part of `h` only.
#[derive(Clone, Debug)]
pub struct ClockHamiltonian {
    pub h: SparseRowMatrix,
    pub h_in: SparseRowMatrix,
    pub h_prop: SparseRowMatrix,
    pub h_out: SparseRowMatrix,
    pub gates: usize,
    pub qubits: usize,
    pub witness: usize,
    pub clock_dim: usize,
    /// (1 - c)/(T + 1) and (1 - s)/T^3 from the verifier's (c, s).
    pub a: f64,
    pub b: f64,
    pub provenance: alloc::string::String,
}

pub fn circuit_to_clock(v: &QmaVerifier) -> Result<ClockHamiltonian> {
    let rows = ClockRows::new(&v.circuit, v.m)?;
    let dim = RowOracle::dim(&rows);
    if dim > tolerances::STATE_CAP {
        return Err(Error::Capacity { dim, cap: tolerances::STATE_CAP });
    }
    let h = SparseRowMatrix::from_oracle(&rows)?;
    let h_prop = SparseRowMatrix::from_rows(dim, (0..dim).map(|i| rows.prop_row(i)).collect())?;
    let diag = |f: &dyn Fn(usize, usize) -> f64| -> Result<SparseRowMatrix> {
        let d: Vec<f64> = (0..dim).map(|i| f(i & ((1 << rows.qubits) - 1), i >> rows.qubits)).collect();
        SparseRowMatrix::diagonal(&d)
    };
    let h_in = diag(&|x, tau| rows.in_penalty(x, tau))?;
    let h_out = diag(&|x, tau| rows.out_penalty(x, tau))?;
    let t = rows.gate_count() as f64;
    Ok(ClockHamiltonian {
        h,
        h_in,
        h_prop,
        h_out,
        gates: rows.gate_count(),
        qubits: rows.qubits,
        witness: v.m,
        clock_dim: rows.clock_dim(),
        a: (1.0 - v.c) / (t + 1.0),
        b: (1.0 - v.s) / (t * t * t),
        provenance: digest(&v.circuit.canonical_bytes()),
    })
}

impl ClockHamiltonian {
    pub fn artifact(&self) -> ReductionArtifact {
        ReductionArtifact {
            matrix: self.h.clone(),
            kind: ReductionKind::Clock,
            thresholds: Thresholds::MinEig { a: self.a, b: self.b },
            provenance: self.provenance.clone(),
            meta: ArtifactMeta {
                gates: Some(self.gates),
                qubits: Some(self.qubits),
                clock_offset: None,
                kappa: None,
                walk: None,
            },
        }
    }
}

/// (T+1)^{-1/2} sum_tau |tau> V_tau ... V_1 |witness, 0>, zero on padding.
pub fn clock_history_state(circuit: &UniformCircuit, witness: &StateVector) -> Result<Vec<C64>> {
    let n = circuit.qubits();
    let m = witness.qubits();
    if m > n {
        return Err(Error::DimensionMismatch { expected: n, got: m });
    }
    let t = circuit.len();
    let clock = (t + 1).next_power_of_two();
    let mut state = witness.tensor(&StateVector::zero(n - m)).into_amplitudes();
    let norm = 1.0 / ((t + 1) as f64).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); clock << n];
    for tau in 0..=t {
        if tau > 0 {
            circuit.gate_at(tau).apply(&mut state);
        }
        for (x, a) in state.iter().enumerate() {
            out[x | tau << n] = a * norm;
        }
    }
    Ok(out)
}
