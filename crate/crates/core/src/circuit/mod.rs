//! Statevector simulation of measurement-free circuits with a designated
//! output qubit.

mod gate;
mod op;
mod state;
mod uniform;

pub use gate::{Gate, GateKind};
pub use op::{turns, AdjointOp, DenseOp, OpHandle, SpectralComponent, UnitaryOp};
pub use state::StateVector;
pub use uniform::{GateSource, UniformCircuit, MAX_GATES};
