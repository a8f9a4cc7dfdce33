//! Hamiltonian evolution, phase estimation, the one-bit phase-estimation
//! test and Grover-type reflection rotations.

mod evolution;
mod one_bit;
mod pe;
mod qft;
mod reflection;

pub use evolution::{evolve, EvolutionOperator};
pub use one_bit::{one_bit_pe, one_bit_pe_circuit, one_bit_pe_with};
pub use pe::{
    ancilla_count, folded_phase, in_window, outcome_amplitude, outcome_probability, pe_circuit, pe_gates, phase_estimate,
    phase_estimate_bits, precision_bits, window_probability, PhaseEstimate, MAX_PE_BITS,
};
pub use qft::{iqft_gates, qft_gates};
pub use reflection::{grover_rotation, GroverRotation, Projector, Reflection};
