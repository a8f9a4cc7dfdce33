use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::circuit::Gate;

/// QFT |x> -> M^{-1/2} sum_y e^{2 pi i x y / M} |y> on `reg`, where `reg[0]`
/// carries the low bit of x and y.
pub fn qft_gates(reg: &[usize]) -> Vec<Gate> {
    let n = reg.len();
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(Gate::h(reg[j]));
        for k in (0..j).rev() {
            let angle = PI / (1u64 << (j - k)) as f64;
            gates.push(Gate::controlled_phase(reg[k], reg[j], angle));
        }
    }
    for i in 0..n / 2 {
        let (a, b) = (reg[i], reg[n - 1 - i]);
        gates.push(Gate::cnot(a, b));
        gates.push(Gate::cnot(b, a));
        gates.push(Gate::cnot(a, b));
    }
    gates
}

pub fn iqft_gates(reg: &[usize]) -> Vec<Gate> {
    qft_gates(reg).iter().rev().map(Gate::adjoint).collect()
}
