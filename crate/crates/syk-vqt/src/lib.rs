//! Thermal (Gibbs) state preparation for the dense and sparse SYK model.
//!
//! The crate simulates a two-circuit variational free-energy minimization:
//! a hardware-efficient circuit (VQC1) fixes the basis probabilities and
//! hence the Shannon entropy, a Hamiltonian-based circuit (VQC2) rotates the
//! basis states toward the thermal eigenbasis, and the Helmholtz free energy
//! `F = <H> - S/beta` is minimized jointly over both parameter sets. Every
//! variational result is checked against an exact-diagonalization oracle.
//!
//! See the guide under `book/` for a narrative walkthrough; its code
//! snippets are doc-tested from [`guide`].

pub mod circuits;
pub mod clifford;
pub mod config;
pub mod engine;
pub mod error;
pub mod guide;
pub mod oracle;
pub mod output;
pub mod pauli;
pub mod syk;
pub mod tfd;
pub use error::{Error, Result};
