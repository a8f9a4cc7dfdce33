use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use super::qft::iqft_gates;
use crate::circuit::{DenseOp, Gate, StateVector, UniformCircuit, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::{cis, normalize, DenseMatrix, C64, ZERO};
use crate::tolerances;

/// Largest register the outcome distribution is materialized for.
pub const MAX_PE_BITS: usize = 24;

/// Result of one run of textbook phase estimation.
#[derive(Clone, Debug)]
pub struct PhaseEstimate {
    /// Sampled estimate y / 2^bits, in [0, 1).
    pub phase: f64,
    pub outcome: usize,
    /// Probability of every register outcome y.
    pub distribution: Vec<f64>,
    /// System state after the register is measured, normalized.
    pub residual_state: StateVector,
    pub ancillas_used: usize,
}

/// ceil(log2(1/precision))
pub fn precision_bits(precision: f64) -> usize {
    let b = (1.0 / precision).log2();
    // Exact powers of two should not pick up a spurious extra bit.
    let r = b.round();
    if (b - r).abs() < 1e-12 {
        r as usize
    } else {
        b.ceil() as usize
    }
}

/// ceil(log2(1/a)) + ceil(log2(2 + 1/(2 eps)))
pub fn ancilla_count(precision: f64, failure: f64) -> usize {
    let extra = (2.0 + 1.0 / (2.0 * failure)).log2();
    let r = extra.round();
    let extra = if (extra - r).abs() < 1e-12 { r as usize } else { extra.ceil() as usize };
    precision_bits(precision) + extra
}

/// Splits M*phase - y into the nearest integer n and remainder r in [-1/2, 1/2].
fn offset(phase: f64, y: usize, bits: usize) -> (f64, f64) {
    let m = (1u64 << bits) as f64;
    let mut x = m * phase - y as f64;
    // Periodic in x with period M.
    x -= m * (x / m).round();
    let n = x.round();
    (x, x - n)
}

/// Amplitude of register outcome y for eigenphase `phase` (turns):
/// (1/M) sum_tau e^{2 pi i tau (phase - y/M)}.
pub fn outcome_amplitude(phase: f64, y: usize, bits: usize) -> C64 {
    let m = (1u64 << bits) as f64;
    let (x, r) = offset(phase, y, bits);
    let delta = x / m;
    let den = (PI * delta).sin();
    if den == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let n = x - r;
    let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let num = sign * (PI * r).sin();
    cis(PI * (m - 1.0) * delta) * (num / (m * den))
}

/// Fejer kernel |outcome_amplitude|^2.
pub fn outcome_probability(phase: f64, y: usize, bits: usize) -> f64 {
    let m = (1u64 << bits) as f64;
    let (x, r) = offset(phase, y, bits);
    let den = (PI * x / m).sin();
    if den == 0.0 {
        return 1.0;
    }
    let num = (PI * r).sin();
    (num * num) / (m * m * den * den)
}

/// min(y/M, 1 - y/M): distance of the estimate from phase 0 on the circle.
pub fn folded_phase(y: usize, bits: usize) -> f64 {
    let m = (1u64 << bits) as f64;
    let f = y as f64 / m;
    f.min(1.0 - f)
}

/// Probability that the folded estimate is at most `threshold` when the
/// eigenphase is `phase`.
pub fn window_probability(phase: f64, bits: usize, threshold: f64) -> f64 {
    let m = 1usize << bits;
    // Outcomes y with min(y, M - y) <= threshold * M.
    let w = (threshold * m as f64 + 1e-9).floor().max(-1.0);
    if w < 0.0 {
        return 0.0;
    }
    let w = (w as usize).min(m / 2);
    let inside = 2 * w + 1 - usize::from(w == m / 2);
    if inside <= m / 2 {
        let mut s = outcome_probability(phase, 0, bits);
        for d in 1..=w {
            s += outcome_probability(phase, d, bits);
            if m - d != d {
                s += outcome_probability(phase, m - d, bits);
            }
        }
        s.min(1.0)
    } else {
        // Sum the complement; the kernel sums to one over all outcomes.
        let mut s = 0.0;
        for y in (w + 1)..=(m - w - 1) {
            s += outcome_probability(phase, y, bits);
        }
        (1.0 - s).max(0.0)
    }
}

/// Phase estimation with ancilla count from `precision` and `failure`.
pub fn phase_estimate<R: Rng + ?Sized>(
    op: &dyn UnitaryOp,
    state: &StateVector,
    precision: f64,
    failure: f64,
    rng: &mut R,
) -> Result<PhaseEstimate> {
    if !(precision > 0.0 && precision <= 0.5) {
        return Err(Error::InvalidParameter(alloc::format!("precision {precision} outside (0, 1/2]")));
    }
    if !(failure > 0.0 && failure < 0.5) {
        return Err(Error::InvalidParameter(alloc::format!("failure {failure} outside (0, 1/2)")));
    }
    phase_estimate_bits(op, state, ancilla_count(precision, failure), rng)
}

/// Phase estimation with an explicit register size. The register statistics
/// are evaluated in the eigenbasis of `op`, which is exact for the
/// uniform-superposition, controlled-power, inverse-QFT circuit.
pub fn phase_estimate_bits<R: Rng + ?Sized>(
    op: &dyn UnitaryOp,
    state: &StateVector,
    bits: usize,
    rng: &mut R,
) -> Result<PhaseEstimate> {
    if bits == 0 || bits > MAX_PE_BITS {
        return Err(Error::Capacity { dim: 1usize << bits.min(63), cap: 1 << MAX_PE_BITS });
    }
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: state.dim() });
    }
    state.check_normalized()?;
    let comps = op.spectral_components(state.amplitudes())?;
    let m = 1usize << bits;
    let mut dist = vec![0.0; m];
    for c in &comps {
        let w = crate::numerics::norm_sqr(&c.vector);
        if w == 0.0 {
            continue;
        }
        for (y, d) in dist.iter_mut().enumerate() {
            *d += w * outcome_probability(c.phase, y, bits);
        }
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > tolerances::DISTRIBUTION_SUM * 10.0 {
        return Err(Error::NonUnitary { deviation: (total - 1.0).abs() });
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = m - 1;
    for (y, d) in dist.iter().enumerate() {
        acc += d;
        if u < acc {
            outcome = y;
            break;
        }
    }
    let mut residual = vec![ZERO; state.dim()];
    for c in &comps {
        let a = outcome_amplitude(c.phase, outcome, bits);
        for (r, x) in residual.iter_mut().zip(&c.vector) {
            *r += a * x;
        }
    }
    normalize(&mut residual);
    Ok(PhaseEstimate {
        phase: outcome as f64 / m as f64,
        outcome,
        distribution: dist,
        residual_state: StateVector::from_amplitudes(residual)?,
        ancillas_used: bits,
    })
}

/// Gate-level phase-estimation circuit for a small dense unitary: system on
/// qubits [0, s), register on [s, s + bits). Register qubit j controls
/// U^(2^j), followed by the inverse QFT on the register.
pub fn pe_circuit(u: &DenseMatrix, bits: usize) -> Result<UniformCircuit> {
    let s = crate::numerics::log2_exact(u.dim())
        .ok_or_else(|| Error::Validation("operator dimension is not a power of two".into()))?;
    let system: Vec<usize> = (0..s).collect();
    let reg: Vec<usize> = (s..s + bits).collect();
    UniformCircuit::new(s + bits, 0, pe_gates(u, &system, &reg)?)
}

/// Phase-estimation gates for `u` acting on `system`, with register `reg`
/// (reg[0] is the low bit of the outcome).
pub fn pe_gates(u: &DenseMatrix, system: &[usize], reg: &[usize]) -> Result<Vec<Gate>> {
    if 1usize << system.len() != u.dim() {
        return Err(Error::DimensionMismatch { expected: 1 << system.len(), got: u.dim() });
    }
    let mut gates: Vec<Gate> = reg.iter().map(|&q| Gate::h(q)).collect();
    let mut power = u.clone();
    for (j, &q) in reg.iter().enumerate() {
        let op = Arc::new(DenseOp::new(power.clone())?);
        gates.push(Gate::controlled(op, system.to_vec(), vec![q]));
        if j + 1 < reg.len() {
            power = power.mul(&power);
        }
    }
    gates.extend(iqft_gates(reg));
    Ok(gates)
}

/// Whether outcome y has folded phase at most `threshold`; the same rule
/// `window_probability` sums over.
pub fn in_window(y: usize, bits: usize, threshold: f64) -> bool {
    let m = 1usize << bits;
    let w = (threshold * m as f64 + 1e-9).floor();
    w >= 0.0 && (y.min(m - y) as f64) <= w
}
