//! Optical-lattice model: potential, trap frequency, field/depth relations,
//! lattice-light Raman scattering, storage error and laser-power bookkeeping.

use crate::atomic_data::Sublevel;
use crate::constants::{C, EPSILON_0, HBAR};
use crate::response::{Polarization, ResponseError, ResponseModel};
use crate::units::{microkelvin_to_joule, wavelength_to_omega};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Background qubit-loss rate (s⁻¹) from a 25 s storage lifetime. Reported
/// alongside storage errors; no loss-detection model is attached to it.
pub const DEFAULT_BACKGROUND_LOSS_RATE: f64 = 1.0 / 25.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    InvalidConfig(String),
    #[error("polarizability is zero; depth and field are not related")]
    ZeroPolarizability,
    #[error(transparent)]
    Response(#[from] ResponseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningSide {
    Blue,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Lattice constant a, m.
    pub spacing: f64,
    /// Depth U_L, J.
    pub depth: f64,
    /// Lattice light vacuum wavelength, m.
    pub wavelength: f64,
    pub side: DetuningSide,
    pub sites_per_axis: u64,
    pub dimensions: u32,
    /// Mass of the trapped atom, kg.
    pub mass: f64,
}

impl LatticeConfig {
    /// Build with the depth in μK and lengths in m.
    pub fn new(
        spacing: f64,
        depth_uk: f64,
        wavelength: f64,
        side: DetuningSide,
        sites_per_axis: u64,
        dimensions: u32,
        mass: f64,
    ) -> Result<Self, LatticeError> {
        let cfg =
            Self { spacing, depth: microkelvin_to_joule(depth_uk), wavelength, side, sites_per_axis, dimensions, mass };
        cfg.validate()?;
        Ok(cfg)
    }

    /// a = 5 μm, U_L = 200 μK, 800 nm blue-detuned, 100 sites per axis in 3D, Cs mass.
    pub fn reference_cs() -> Self {
        Self::new(5e-6, 200.0, 800e-9, DetuningSide::Blue, 100, 3, crate::AtomSpec::cesium().mass)
            .expect("reference lattice is valid")
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let bad = |m: &str| Err(LatticeError::InvalidConfig(m.to_string()));
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return bad("lattice constant must be positive");
        }
        if !(self.depth > 0.0 && self.depth.is_finite()) {
            return bad("depth must be positive");
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return bad("wavelength must be positive");
        }
        if self.sites_per_axis < 1 {
            return bad("sites_per_axis must be at least 1");
        }
        if !(self.dimensions == 2 || self.dimensions == 3) {
            return bad("dimensions must be 2 or 3");
        }
        if !(self.mass > 0.0) {
            return bad("mass must be positive");
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        wavelength_to_omega(self.wavelength)
    }

    /// Total number of sites.
    pub fn site_count(&self) -> f64 {
        (self.sites_per_axis as f64).powi(self.dimensions as i32)
    }
}

/// Who is scheduled and for how long, for converting a rate into a storage EPG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageContext {
    /// Total qubit count N.
    pub n_total: f64,
    /// Simultaneously addressable qubits n_A.
    pub n_addressable: f64,
    /// Gate time T_1, s.
    pub gate_time: f64,
}

impl StorageContext {
    pub fn new(n_total: f64, n_addressable: f64, gate_time: f64) -> Result<Self, LatticeError> {
        if !(n_addressable >= 1.0 && n_addressable <= n_total) {
            return Err(LatticeError::InvalidConfig("need 1 <= n_A <= N".into()));
        }
        if !(gate_time > 0.0) {
            return Err(LatticeError::InvalidConfig("gate time must be positive".into()));
        }
        Ok(Self { n_total, n_addressable, gate_time })
    }
}

/// (U_L/2) cos(2πx/a).
pub fn lattice_potential(cfg: &LatticeConfig, x: f64) -> f64 {
    0.5 * cfg.depth * (2.0 * PI * x / cfg.spacing).cos()
}

/// ω_τ = (π/a) √(2U_L/m).
pub fn trap_frequency(cfg: &LatticeConfig) -> f64 {
    PI / cfg.spacing * (2.0 * cfg.depth / cfg.mass).sqrt()
}

/// U_L = (E₀²/4)|α|.
pub fn depth_from_field(e0_sq: f64, alpha: f64) -> Result<f64, LatticeError> {
    if alpha == 0.0 {
        return Err(LatticeError::ZeroPolarizability);
    }
    Ok(0.25 * e0_sq * alpha.abs())
}

/// E₀² = 4U_L/|α|.
pub fn field_from_depth(depth: f64, alpha: f64) -> Result<f64, LatticeError> {
    if alpha == 0.0 {
        return Err(LatticeError::ZeroPolarizability);
    }
    Ok(4.0 * depth / alpha.abs())
}

/// Ē²/E₀² seen by a ground-state atom: ħπ²/(2a²mω_τ) for blue detuning, 1 for red.
pub fn mean_square_ratio(cfg: &LatticeConfig) -> f64 {
    match cfg.side {
        DetuningSide::Red => 1.0,
        DetuningSide::Blue => HBAR * PI * PI / (2.0 * cfg.spacing * cfg.spacing * cfg.mass * trap_frequency(cfg)),
    }
}

pub fn mean_square_field(cfg: &LatticeConfig, e0_sq: f64) -> f64 {
    mean_square_ratio(cfg) * e0_sq
}

/// Γ/ħ = c ε₀ Ē² σ / (2ħω).
pub fn scatter_rate_from_field(mean_square_field: f64, omega: f64, sigma: f64) -> f64 {
    C * EPSILON_0 * mean_square_field * sigma / (2.0 * HBAR * omega)
}

/// Raman scattering rate of lattice light for an atom in `state`, s⁻¹.
pub fn storage_scatter_rate(
    cfg: &LatticeConfig,
    model: &ResponseModel,
    state: &Sublevel,
    eps: Polarization,
) -> Result<f64, LatticeError> {
    let omega = cfg.omega();
    let sigma = model.raman_cross_section(state, omega, eps)?;
    let alpha = model.polarizability(state, omega, eps)?;
    let e0_sq = field_from_depth(cfg.depth, alpha)?;
    Ok(scatter_rate_from_field(mean_square_field(cfg, e0_sq), omega, sigma))
}

/// (N/n_A)·T₁·rate.
pub fn storage_epg(rate: f64, ctx: &StorageContext) -> f64 {
    rate * ctx.gate_time * ctx.n_total / ctx.n_addressable
}

/// Reference scenario for the power model: 100 sites per axis at a = 10 μm,
/// U_L = 500 μK and λ = 851.7 nm, served by 10 W per beam set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAnchor {
    pub spacing: f64,
    pub depth: f64,
    pub wavelength: f64,
    pub sites_per_axis: u64,
    pub power: f64,
}

impl Default for PowerAnchor {
    fn default() -> Self {
        Self {
            spacing: 10e-6,
            depth: microkelvin_to_joule(500.0),
            wavelength: 851.7e-9,
            sites_per_axis: 100,
            power: 10.0,
        }
    }
}

/// Laser power per beam set, P ∝ a²·n²·U_L/|α(λ)|, calibrated so the anchor
/// scenario needs exactly `anchor.power`. The geometric prefactor is not derived;
/// the calibration absorbs it.
#[derive(Debug, Clone)]
pub struct PowerModel {
    pub anchor: PowerAnchor,
    coefficient: f64,
    state: Sublevel,
    eps: Polarization,
}

impl PowerModel {
    pub fn calibrated(
        model: &ResponseModel,
        state: &Sublevel,
        eps: Polarization,
        anchor: PowerAnchor,
    ) -> Result<Self, LatticeError> {
        let alpha = model.polarizability(state, wavelength_to_omega(anchor.wavelength), eps)?;
        if alpha == 0.0 {
            return Err(LatticeError::ZeroPolarizability);
        }
        let n = anchor.sites_per_axis as f64;
        let coefficient = anchor.power * alpha.abs() / (anchor.spacing.powi(2) * n * n * anchor.depth);
        Ok(Self { anchor, coefficient, state: *state, eps })
    }

    /// Power per beam set in W; `margin` multiplies the calibrated value.
    pub fn power(&self, model: &ResponseModel, cfg: &LatticeConfig, margin: f64) -> Result<f64, LatticeError> {
        let alpha = model.polarizability(&self.state, cfg.omega(), self.eps)?;
        if alpha == 0.0 {
            return Err(LatticeError::ZeroPolarizability);
        }
        let n = cfg.sites_per_axis as f64;
        Ok(margin * self.coefficient * cfg.spacing.powi(2) * n * n * cfg.depth / alpha.abs())
    }

    /// Largest site count (possibly fractional per axis) reachable with `p_max`
    /// per beam set at the configuration's spacing, depth and wavelength.
    pub fn achievable_sites(
        &self,
        model: &ResponseModel,
        cfg: &LatticeConfig,
        p_max: f64,
    ) -> Result<f64, LatticeError> {
        let alpha = model.polarizability(&self.state, cfg.omega(), self.eps)?;
        let n = (p_max * alpha.abs() / (self.coefficient * cfg.spacing.powi(2) * cfg.depth)).sqrt();
        Ok(n.powi(cfg.dimensions as i32))
    }
}

/// Convenience wrapper using the default anchor, |F=3, m_F=0⟩-style lower qubit
/// state `state` and σ⁺ light.
pub fn lattice_power_required(
    cfg: &LatticeConfig,
    model: &ResponseModel,
    state: &Sublevel,
    margin: f64,
) -> Result<f64, LatticeError> {
    PowerModel::calibrated(model, state, Polarization::SIGMA_PLUS, PowerAnchor::default())?.power(model, cfg, margin)
}
