//! Microwave single-qubit gate addressed by a focused light-shift beam: the
//! Gaussian beam model and the analytic error mechanisms. The full dynamics of
//! the gate live in the propagator crate.
//!
//! Units: `delta_ac` is a plain s⁻¹ value. A shift quoted as "0.2 MHz" enters
//! as 2×10⁵ s⁻¹, with no factor of 2π.

use crate::atomic_data::Sublevel;
use crate::constants::{EPSILON_0, HBAR};
use crate::lattice::{trap_frequency, LatticeConfig, StorageContext};
use crate::response::{Polarization, ResponseError, ResponseModel};
use crate::units::wavelength_to_omega;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Light-scattering rate per unit light shift for the auxiliary states at the
/// magic wavelength, dimensionless (Γ/ħ = coefficient × Δ_ac).
pub const SCATTER_COEFF: f64 = 3.4e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveGateConfig {
    /// Light shift of the auxiliary levels at beam centre, s⁻¹.
    pub delta_ac: f64,
    pub w0: f64,
    pub lambda_m: f64,
    /// Total gate time, s.
    pub t1: f64,
    /// |2⟩↔|3⟩ coupling, s⁻¹.
    pub omega_1: f64,
    /// |0⟩↔|2⟩ and |1⟩↔|3⟩ coupling, s⁻¹.
    pub omega_2: f64,
    /// Pulse timing resolution, s.
    pub delta_t: f64,
    /// Addressing-beam pointing error, m.
    pub delta_x: f64,
}

impl MicrowaveGateConfig {
    /// Builder that ties the outer couplings to the inner one, Ω₂ = (√3/2)Ω₁.
    #[allow(clippy::too_many_arguments)]
    pub fn recommended(
        delta_ac: f64,
        w0: f64,
        lambda_m: f64,
        t1: f64,
        omega_1: f64,
        delta_t: f64,
        delta_x: f64,
    ) -> Self {
        Self { delta_ac, w0, lambda_m, t1, omega_1, omega_2: 3f64.sqrt() / 2.0 * omega_1, delta_t, delta_x }
    }

    /// Δ_ac = 2×10⁵ s⁻¹, w₀ = 1.2 μm, λ_M = 880 nm, T₁ = 76 μs, Ω₁ = 41341 s⁻¹,
    /// δ_T = 0.1 ns, no pointing error.
    pub fn reference() -> Self {
        Self::recommended(2e5, 1.2e-6, 880e-9, 76e-6, 41341.0, 1e-10, 0.0)
    }

    pub fn beam(&self) -> GaussianBeam {
        GaussianBeam::new(self.w0, self.lambda_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    pub w0: f64,
    pub lambda: f64,
}

impl GaussianBeam {
    pub fn new(w0: f64, lambda: f64) -> Self {
        Self { w0, lambda }
    }

    /// z_R = πw₀²/λ.
    pub fn rayleigh_length(&self) -> f64 {
        PI * self.w0 * self.w0 / self.lambda
    }

    pub fn width(&self, z: f64) -> f64 {
        let zr = self.rayleigh_length();
        self.w0 * (1.0 + z * z / (zr * zr)).sqrt()
    }

    /// I(r, z)/I₀ = (w₀²/w²(z))·exp(−2r²/w²(z)).
    pub fn relative_intensity(&self, r: f64, z: f64) -> f64 {
        let w = self.width(z);
        let ratio = self.w0 * self.w0 / (w * w);
        ratio * (-2.0 * r * r / (w * w)).exp()
    }
}

/// Which duration the off-resonant estimate divides the timing error by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegTime {
    /// The full gate time T₁ (reproduces the tabulated row).
    #[default]
    GateTime,
    /// One leg, T₁' = T₁/3.
    SingleLeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffResonantError {
    /// Transition probability for one non-target atom.
    pub per_atom: f64,
    /// (N/n_A) × per-atom value.
    pub aggregated: f64,
}

/// Full Rabi formula Ω²/(Ω²+Δ²)·sin²(√(Ω²+Δ²)(t + δt)/2).
pub fn off_resonant_rabi(omega: f64, delta: f64, t_leg: f64, timing_error: f64) -> f64 {
    let g2 = omega * omega + delta * delta;
    omega * omega / g2 * (g2.sqrt() * (t_leg + timing_error) / 2.0).sin().powi(2)
}

/// (π δ_T / 2T)² per non-target atom and its lattice aggregate.
pub fn p_off_resonant(cfg: &MicrowaveGateConfig, ctx: &StorageContext, leg: LegTime) -> OffResonantError {
    let t = match leg {
        LegTime::GateTime => cfg.t1,
        LegTime::SingleLeg => cfg.t1 / 3.0,
    };
    let per_atom = (PI / 2.0 * cfg.delta_t / t).powi(2);
    OffResonantError { per_atom, aggregated: per_atom * ctx.n_total / ctx.n_addressable }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialError {
    /// min(raw, 1).
    pub value: f64,
    /// (9π²/16)(z/z_R)⁸ without capping.
    pub raw: f64,
    /// Set once the raw estimate reaches 1.
    pub order_unity: bool,
}

/// Error for an atom a distance z along the beam axis from the waist.
pub fn axial_addressing_error(cfg: &MicrowaveGateConfig, z: f64) -> AxialError {
    let zr = cfg.beam().rayleigh_length();
    let raw = 9.0 * PI * PI / 16.0 * (z / zr).powi(8);
    AxialError { value: raw.min(1.0), raw, order_unity: raw >= 1.0 }
}

/// Overlap ξ_T = (√2/2)ħΔ_ac/(mω_τ²w₀²) between the qubit-state ground and the
/// first even excited state of the shifted auxiliary potential.
pub fn heating_overlap(cfg: &MicrowaveGateConfig, lattice: &LatticeConfig) -> f64 {
    let w = trap_frequency(lattice);
    std::f64::consts::FRAC_1_SQRT_2 * HBAR * cfg.delta_ac / (lattice.mass * w * w * cfg.w0 * cfg.w0)
}

/// Closed form ħ²Δ_ac²ma⁶/(64π⁴T₁²U_L³w₀⁴).
pub fn p_heating(cfg: &MicrowaveGateConfig, lattice: &LatticeConfig) -> f64 {
    HBAR * HBAR * cfg.delta_ac.powi(2) * lattice.mass * lattice.spacing.powi(6)
        / (64.0 * PI.powi(4) * cfg.t1.powi(2) * lattice.depth.powi(3) * cfg.w0.powi(4))
}

/// Unsimplified Rabi expression behind [`p_heating`].
pub fn p_heating_rabi(cfg: &MicrowaveGateConfig, lattice: &LatticeConfig) -> f64 {
    let w = trap_frequency(lattice);
    let c = cfg.omega_1 * heating_overlap(cfg, lattice);
    let g2 = c * c + 4.0 * w * w;
    c * c / g2 * (g2.sqrt() * cfg.t1 / 2.0).sin().powi(2)
}

/// 3.4×10⁻⁶·Δ_ac·T₁.
pub fn p_scatter(cfg: &MicrowaveGateConfig) -> f64 {
    SCATTER_COEFF * cfg.delta_ac * cfg.t1
}

/// λ ε₀ σ(λ)/(π|α|): the scattering rate per unit light shift, computed from
/// the Kramers-Heisenberg cross section of `state` at `lambda` and the
/// polarizability magnitude `alpha` that sets the light shift.
pub fn scatter_coefficient(
    model: &ResponseModel,
    state: &Sublevel,
    lambda: f64,
    alpha: f64,
    eps: Polarization,
) -> Result<f64, ResponseError> {
    let sigma = model.raman_cross_section(state, wavelength_to_omega(lambda), eps)?;
    Ok(lambda * EPSILON_0 * sigma / (PI * alpha.abs()))
}

/// (4/π²)Δ_ac²T₁²δ_x⁴/w₀⁴.
pub fn p_position_detuning(cfg: &MicrowaveGateConfig) -> f64 {
    4.0 / (PI * PI) * cfg.delta_ac.powi(2) * cfg.t1.powi(2) * (cfg.delta_x / cfg.w0).powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Legs {
    /// One outer leg with pointing error δ_x.
    Single,
    /// Two outer legs at δ_x plus the inner leg at 2δ_x.
    FullGate,
}

/// (√2/π³)ħΔ_ac²δ_x²a⁵m^{3/2}/(T₁²U_L^{5/2}w₀⁴) for one leg at pointing error `dx`.
pub fn position_heating_leg(cfg: &MicrowaveGateConfig, lattice: &LatticeConfig, dx: f64) -> f64 {
    2f64.sqrt() / PI.powi(3) * HBAR * cfg.delta_ac.powi(2) * dx * dx * lattice.spacing.powi(5) * lattice.mass.powf(1.5)
        / (cfg.t1.powi(2) * lattice.depth.powf(2.5) * cfg.w0.powi(4))
}

pub fn p_position_heating(cfg: &MicrowaveGateConfig, lattice: &LatticeConfig, legs: Legs) -> f64 {
    match legs {
        Legs::Single => position_heating_leg(cfg, lattice, cfg.delta_x),
        Legs::FullGate => {
            2.0 * position_heating_leg(cfg, lattice, cfg.delta_x)
                + position_heating_leg(cfg, lattice, 2.0 * cfg.delta_x)
        }
    }
}

/// Simulated values that replace the analytic heating rows when available.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimulatedRows {
    pub heating: Option<f64>,
    pub position_heating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveRow {
    pub name: String,
    pub symbol: String,
    pub formula: f64,
    pub simulation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveBudget {
    pub rows: Vec<MicrowaveRow>,
    /// Sum of the analytic values.
    pub total: f64,
    /// Sum with simulated values substituted where supplied.
    pub total_with_simulation: f64,
}

impl MicrowaveBudget {
    pub fn get(&self, symbol: &str) -> Option<&MicrowaveRow> {
        self.rows.iter().find(|r| r.symbol == symbol)
    }
}

/// All microwave gate-error mechanisms. Storage errors are reported separately
/// by the caller.
pub fn total_microwave_epg(
    cfg: &MicrowaveGateConfig,
    lattice: &LatticeConfig,
    ctx: &StorageContext,
    simulated: SimulatedRows,
) -> MicrowaveBudget {
    let row = |name: &str, symbol: &str, formula: f64, simulation: Option<f64>| MicrowaveRow {
        name: name.into(),
        symbol: symbol.into(),
        formula,
        simulation,
    };
    let rows = vec![
        row("Off-resonant transitions", "P_mo", p_off_resonant(cfg, ctx, LegTime::GateTime).aggregated, None),
        row("Addressing beam-induced heating", "P_mh", p_heating(cfg, lattice), simulated.heating),
        row("Raman scattering", "P_ms", p_scatter(cfg), None),
        row(
            "Addressing beam position (heating)",
            "P_mph",
            p_position_heating(cfg, lattice, Legs::FullGate),
            simulated.position_heating,
        ),
        row("Addressing beam position (detuning)", "P_mpt", p_position_detuning(cfg), None),
    ];
    let total = rows.iter().map(|r| r.formula).sum();
    let total_with_simulation = rows.iter().map(|r| r.simulation.unwrap_or(r.formula)).sum();
    MicrowaveBudget { rows, total, total_with_simulation }
}
