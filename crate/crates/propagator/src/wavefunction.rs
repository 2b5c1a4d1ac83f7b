//! Spatial amplitudes for every internal level.

use crate::grid::SpatialGrid;
use crate::PropagatorError;
use num_complex::Complex64;

/// Amplitudes stored level-major: `data[level * grid.size() + point]`.
/// Normalisation is Σ_levels Σ_points |ψ|²·cell = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLevelWavefunction {
    pub levels: usize,
    pub grid: SpatialGrid,
    pub data: Vec<Complex64>,
}

impl MultiLevelWavefunction {
    pub fn zeros(levels: usize, grid: SpatialGrid) -> Self {
        Self { levels, grid, data: vec![Complex64::new(0.0, 0.0); levels * grid.size()] }
    }

    /// All population in `level` with the given spatial profile, normalised.
    pub fn from_level(
        levels: usize,
        grid: SpatialGrid,
        level: usize,
        profile: &[Complex64],
    ) -> Result<Self, PropagatorError> {
        if level >= levels || profile.len() != grid.size() {
            return Err(PropagatorError::Mismatch("profile size or level index".into()));
        }
        let mut psi = Self::zeros(levels, grid);
        psi.level_mut(level).copy_from_slice(profile);
        psi.normalize()?;
        Ok(psi)
    }

    pub fn level(&self, l: usize) -> &[Complex64] {
        let n = self.grid.size();
        &self.data[l * n..(l + 1) * n]
    }

    pub fn level_mut(&mut self, l: usize) -> &mut [Complex64] {
        let n = self.grid.size();
        &mut self.data[l * n..(l + 1) * n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    pub fn normalize(&mut self) -> Result<(), PropagatorError> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(PropagatorError::NotNormalized(n));
        }
        let s = 1.0 / n.sqrt();
        self.data.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// ⟨self|other⟩ over all levels.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.cell()
    }

    /// Population of each level.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.levels).map(|l| self.level(l).iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()).collect()
    }

    /// |ψ_l(x)|² for every level, in flat grid order.
    pub fn densities(&self) -> Vec<Vec<f64>> {
        (0..self.levels).map(|l| self.level(l).iter().map(|z| z.norm_sqr()).collect()).collect()
    }

    /// 1 − |⟨self|other⟩|² for normalised states.
    pub fn infidelity(&self, other: &Self) -> f64 {
        1.0 - self.inner(other).norm_sqr()
    }
}
