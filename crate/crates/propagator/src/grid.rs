//! Periodic Cartesian grids in one or two dimensions.

use crate::PropagatorError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Square periodic grid with `n_points` points per axis over `length`, centred
/// on the origin. Point k along an axis sits at −L/2 + k·dx.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub n_points: usize,
    pub length: f64,
    pub dimensions: usize,
}

impl SpatialGrid {
    pub fn new(n_points: usize, length: f64, dimensions: usize) -> Result<Self, PropagatorError> {
        let g = Self { n_points, length, dimensions };
        g.validate()?;
        Ok(g)
    }

    pub fn one_d(n_points: usize, length: f64) -> Result<Self, PropagatorError> {
        Self::new(n_points, length, 1)
    }

    pub fn validate(&self) -> Result<(), PropagatorError> {
        if self.n_points < 16 || !self.n_points.is_power_of_two() {
            return Err(PropagatorError::InvalidGrid(format!(
                "n_points must be a power of two and at least 16, got {}",
                self.n_points
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(PropagatorError::InvalidGrid(format!("length must be positive, got {}", self.length)));
        }
        if !(self.dimensions == 1 || self.dimensions == 2) {
            return Err(PropagatorError::InvalidGrid(format!("dimensions must be 1 or 2, got {}", self.dimensions)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    /// Total number of grid points (n or n²).
    pub fn size(&self) -> usize {
        self.n_points.pow(self.dimensions as u32)
    }

    /// Axis coordinates.
    pub fn axis(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points).map(|k| -0.5 * self.length + k as f64 * dx).collect()
    }

    /// Axis wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.length;
        (0..n).map(|k| if k < n / 2 { k as f64 * dk } else { (k - n) as f64 * dk }).collect()
    }

    /// Largest |k| on an axis, π/dx.
    pub fn k_max(&self) -> f64 {
        PI / self.spacing()
    }

    /// Coordinates of flat index `idx` (row-major, x fastest).
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let x = self.axis();
        match self.dimensions {
            1 => (x[idx], 0.0),
            _ => (x[idx % self.n_points], x[idx / self.n_points]),
        }
    }

    /// Evaluate `f(x, y)` at every point in flat order. `y` is 0 in 1D.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let x = self.axis();
        match self.dimensions {
            1 => x.iter().map(|&xi| f(xi, 0.0)).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.size());
                for &yj in &x {
                    for &xi in &x {
                        out.push(f(xi, yj));
                    }
                }
                out
            }
        }
    }

    /// Kinetic energy ħ²|k|²/2m at each momentum-grid point in FFT order.
    pub fn kinetic_energies(&self, mass: f64) -> Vec<f64> {
        let hb = alqc_core::constants::HBAR;
        let k = self.wavenumbers();
        let e = |kk: f64| hb * hb * kk / (2.0 * mass);
        match self.dimensions {
            1 => k.iter().map(|&kx| e(kx * kx)).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.size());
                for &ky in &k {
                    for &kx in &k {
                        out.push(e(kx * kx + ky * ky));
                    }
                }
                out
            }
        }
    }

    /// Volume element dx or dx².
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dimensions as i32)
    }
}
