//! Simulation of quantum search assisted by a coherent spin bath.
//!
//! A system register whose problem Hamiltonian encodes a target label is
//! coupled to an auxiliary bath register that starts in its ground state and
//! absorbs energy. The crate provides
//!
//! - basis conventions and state vectors ([`spin`]),
//! - matrix-free Hamiltonians of the toy, non-local and local models ([`hamiltonian`]),
//! - Krylov time evolution, observables and spectra ([`dynamics`]),
//! - closed-form and reduced models used to check the simulations ([`analytics`]),
//! - parity-block eigensolves and gap scaling for the local model ([`subspace`]).
//!
//! Basis index `i` of a register has qubit `m` in bit `m`; bit value 1 is
//! spin-up (`sigma^z = +1`). Composite labels are `i_s * N_b + j_b`.

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod spin;
pub mod subspace;

pub use error::{Error, Result};
pub use spin::{Axis, Register, Space, StateVector, SystemDims, C64};
