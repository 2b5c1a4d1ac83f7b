//! Pseudo-spectral dynamics for atoms with several internal levels on a
//! periodic spatial grid.
//!
//! The propagator expands exp(−iHt/ħ) in Chebyshev polynomials of the scaled
//! Hamiltonian. Kinetic energy acts in momentum space through FFTs, potentials
//! act pointwise and internal-level couplings act across levels at each grid
//! point. A dense-matrix reference propagator exists for small grids so the fast
//! path can be checked against it.
//!
//! [`gate`] builds the four-level microwave gate with a focused light-shift
//! beam and [`simulate`] runs it.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod chebyshev;
pub mod eigenstates;
pub mod gate;
pub mod grid;
pub mod hamiltonian;
pub mod oracle;
pub mod simulate;
pub mod wavefunction;

pub use chebyshev::{propagate, PropagateOptions, PropagationStats};
pub use gate::{build_microwave_gate, Calibration, GateOptions, GateVariant, MicrowaveGate};
pub use grid::SpatialGrid;
pub use hamiltonian::{Coupling, DressedHamiltonian, PulseSchedule};
pub use simulate::{simulate_gate, GateResult, SimulationOptions};
pub use wavefunction::MultiLevelWavefunction;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("wavefunction and Hamiltonian disagree: {0}")]
    Mismatch(String),
    #[error("detunings around a coupling loop are inconsistent (levels {0} and {1})")]
    InconsistentDetuning(usize, usize),
    #[error("Chebyshev order {needed} exceeds the cap of {cap} terms even after subdivision")]
    ToleranceUnreachable { needed: usize, cap: usize },
    #[error("grid under-resolved: {fraction:.3e} of the population sits near the momentum cutoff")]
    GridUnderresolved { fraction: f64 },
    #[error("dense reference propagator limited to {cap} basis states, got {size}")]
    GridTooLarge { size: usize, cap: usize },
    #[error("invalid time step {0}")]
    InvalidTime(f64),
    #[error("input state is not normalised (norm² = {0})")]
    NotNormalized(f64),
    #[error("linear algebra failure: {0}")]
    Numerical(String),
}
