//! Statevector simulation, phase estimation, well-conditioned matrix
//! inversion, QMA verification with in-place amplification, and the
//! circuit/Hamiltonian reductions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the verification corpus live in the `qspace` crate.
//!
//! Qubit 0 is the least significant bit of a basis index everywhere.

#![no_std]

extern crate alloc;

pub mod circuit;
pub mod error;
pub mod generators;
pub mod matinv;
pub mod numerics;
pub mod qma;
pub mod reductions;
pub mod spectral;
pub mod tolerances;

pub use error::{Error, Result};
pub use numerics::C64;
