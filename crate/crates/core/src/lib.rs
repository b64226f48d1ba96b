//! Evolutionary architecture search over Pauli-rotation circuits.
//!
//! A (1+λ) elitist loop mutates circuits gate by gate (insert, delete, swap,
//! modify) and keeps the offspring with the lowest Hamiltonian expectation.
//! The crate bundles the statevector simulator used to score circuits, the
//! benchmark Hamiltonians, a parameter-shift gradient-descent baseline and
//! post-run statistics.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod evolution;
pub mod gradient;
pub mod hamiltonian;
pub mod quantum;
pub mod runlog;

pub use error::{Error, Result};
