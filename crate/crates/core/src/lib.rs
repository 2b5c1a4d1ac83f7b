//! Error-budget engine for neutral-atom qubits held in addressable optical lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`angular`] holds Wigner 3j/6j symbols and hyperfine dipole matrix elements.
//! * [`atomic_data`] loads and validates alkali level data (Cs ships bundled).
//! * [`response`] evaluates Kramers-Heisenberg cross sections and dynamic polarizabilities.
//! * [`lattice`] models the trapping lattice and its light: scattering and laser power.
//! * [`raman_gate`] and [`microwave_gate`] hold the analytic gate-error mechanisms.
//! * [`budget`] ties everything together: constrained optimisation, error surfaces,
//!   cross-talk density and scaling reports.
//!
//! Everything is SI internally. Conversions from μK, nm, GHz and friends happen in
//! [`units`] at the boundary.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod atomic_data;
pub mod budget;
pub mod constants;
pub mod lattice;
pub mod microwave_gate;
pub mod optimize;
pub mod raman_gate;
pub mod response;
pub mod units;

pub use angular::HalfInteger;
pub use atomic_data::{AtomSpec, Sublevel};
pub use lattice::{DetuningSide, LatticeConfig, StorageContext};
pub use response::{Polarization, ResponseModel};
