//! Four-level microwave gate: qubit levels 0 and 1, auxiliary levels 2 and 3
//! light-shifted in opposite directions by a focused beam.

use crate::eigenstates::{eigenstates_1d, product_states_2d, MotionalBasis};
use crate::grid::SpatialGrid;
use crate::hamiltonian::{Coupling, DressedHamiltonian, PulseSchedule};
use crate::wavefunction::MultiLevelWavefunction;
use crate::PropagatorError;
use alqc_core::constants::HBAR;
use alqc_core::lattice::{lattice_potential, LatticeConfig};
use alqc_core::microwave_gate::MicrowaveGateConfig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the microwave detunings are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Resonant with the light shift averaged over the motional ground state of
    /// a centred beam.
    #[default]
    MotionalGround,
    /// Resonant with the peak light shift at beam centre.
    BeamCenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateVariant {
    /// All three couplings on for the whole gate time.
    #[default]
    Simultaneous,
    /// Three consecutive π pulses 0→2, 2→3, 3→1.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    pub calibration: Calibration,
    pub variant: GateVariant,
    /// Motional states kept for the excitation analysis.
    pub projector_states: usize,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self { calibration: Calibration::default(), variant: GateVariant::default(), projector_states: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct MicrowaveGate {
    pub schedule: PulseSchedule,
    pub initial: MultiLevelWavefunction,
    pub target: MultiLevelWavefunction,
    pub motional: MotionalBasis,
    /// Detunings of the 0→2, 1→3 and 2→3 drives, rad/s.
    pub detunings: [f64; 3],
}

/// One-period grid centred on a lattice well.
pub fn gate_grid(lattice: &LatticeConfig, n_points: usize, dimensions: usize) -> Result<SpatialGrid, PropagatorError> {
    SpatialGrid::new(n_points, lattice.spacing, dimensions)
}

/// Lattice potential shifted so a minimum sits at the origin.
fn well(lattice: &LatticeConfig, x: f64) -> f64 {
    lattice_potential(lattice, x + 0.5 * lattice.spacing)
}

pub fn build_microwave_gate(
    lattice: &LatticeConfig,
    gate: &MicrowaveGateConfig,
    grid: &SpatialGrid,
    delta_x: f64,
    options: &GateOptions,
) -> Result<MicrowaveGate, PropagatorError> {
    grid.validate()?;
    lattice.validate().map_err(|e| PropagatorError::InvalidHamiltonian(e.to_string()))?;
    if !(gate.omega_1 > 0.0 && gate.omega_2 > 0.0 && gate.t1 > 0.0 && gate.w0 > 0.0) {
        return Err(PropagatorError::InvalidHamiltonian("gate couplings, time and waist must be positive".into()));
    }
    if !delta_x.is_finite() || !gate.delta_ac.is_finite() {
        return Err(PropagatorError::InvalidHamiltonian("non-finite beam parameters".into()));
    }
    if options.projector_states == 0 {
        return Err(PropagatorError::InvalidHamiltonian("need at least one motional state".into()));
    }
    let mass = lattice.mass;
    let w0 = gate.w0;
    let v = grid.sample(|x, y| well(lattice, x) + if grid.dimensions == 2 { well(lattice, y) } else { 0.0 });
    let shift =
        |x0: f64| grid.sample(|x, y| HBAR * gate.delta_ac * (-2.0 * ((x - x0).powi(2) + y * y) / (w0 * w0)).exp());
    let beam = shift(delta_x);

    let axis = SpatialGrid::one_d(grid.n_points, grid.length)?;
    let axis_v = axis.sample(|x, _| well(lattice, x));
    let axis_basis = eigenstates_1d(&axis, &axis_v, mass, options.projector_states.min(grid.n_points))?;
    let motional = match grid.dimensions {
        1 => axis_basis,
        _ => product_states_2d(&axis_basis, options.projector_states),
    };
    let ground = &motional.states[0];

    // Light shift the drives are tuned to, J.
    let s = match options.calibration {
        Calibration::BeamCenter => HBAR * gate.delta_ac,
        Calibration::MotionalGround => {
            let centred = shift(0.0);
            ground.iter().zip(&centred).map(|(g, b)| g * g * b).sum::<f64>() * grid.cell()
        }
    };
    let d02 = s / HBAR;
    let d13 = -s / HBAR;
    let d23 = -2.0 * s / HBAR;

    let potentials = vec![
        v.clone(),
        v.clone(),
        v.iter().zip(&beam).map(|(a, b)| a + b).collect(),
        v.iter().zip(&beam).map(|(a, b)| a - b).collect(),
    ];
    let full = vec![
        Coupling { i: 0, j: 2, rabi: 2.0 * gate.omega_2, detuning: d02 },
        Coupling { i: 1, j: 3, rabi: 2.0 * gate.omega_2, detuning: d13 },
        Coupling { i: 2, j: 3, rabi: 2.0 * gate.omega_1, detuning: d23 },
    ];
    let simultaneous = DressedHamiltonian::new(*grid, mass, potentials.clone(), full)?;
    let schedule = match options.variant {
        GateVariant::Simultaneous => PulseSchedule::new(vec![(gate.t1, simultaneous)])?,
        GateVariant::Sequential => {
            // Keep the frame of the full gate in every segment so phases carry over.
            let offsets = simultaneous.offsets().to_vec();
            let omega = gate.omega_1;
            let t = PI / omega;
            let seg = |c: Coupling| -> Result<(f64, DressedHamiltonian), PropagatorError> {
                let h =
                    DressedHamiltonian::new(*grid, mass, potentials.clone(), vec![c])?.with_offsets(offsets.clone())?;
                Ok((t, h))
            };
            PulseSchedule::new(vec![
                seg(Coupling { i: 0, j: 2, rabi: omega, detuning: d02 })?,
                seg(Coupling { i: 2, j: 3, rabi: omega, detuning: d23 })?,
                seg(Coupling { i: 1, j: 3, rabi: omega, detuning: d13 })?,
            ])?
        }
    };

    let profile: Vec<Complex64> = ground.iter().map(|&g| Complex64::new(g, 0.0)).collect();
    let initial = MultiLevelWavefunction::from_level(4, *grid, 0, &profile)?;
    let target = MultiLevelWavefunction::from_level(4, *grid, 1, &profile)?;
    Ok(MicrowaveGate { schedule, initial, target, motional, detunings: [d02, d13, d23] })
}
