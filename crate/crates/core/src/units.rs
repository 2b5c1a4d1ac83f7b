//! Boundary conversions between lab units and the SI values used internally.

use crate::constants::{C, K_B};
use std::f64::consts::PI;

pub fn microkelvin_to_joule(t_uk: f64) -> f64 {
    t_uk * 1e-6 * K_B
}

pub fn joule_to_microkelvin(e: f64) -> f64 {
    e / (1e-6 * K_B)
}

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn wavelength_to_omega(lambda: f64) -> f64 {
    2.0 * PI * C / lambda
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

/// Ordinary frequency in Hz to rad/s.
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}
