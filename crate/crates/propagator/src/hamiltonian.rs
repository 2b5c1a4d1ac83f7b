//! Rotating-frame Hamiltonians for several internal levels and the operator that
//! applies them to a wavefunction.

use crate::grid::SpatialGrid;
use crate::wavefunction::MultiLevelWavefunction;
use crate::PropagatorError;
use alqc_core::constants::HBAR;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::VecDeque;
use std::sync::Arc;

/// Coupling between two levels with Rabi frequency `rabi` (the off-diagonal
/// element is ħ·rabi/2) and field detuning `detuning` from the bare i→j
/// transition, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub rabi: f64,
    pub detuning: f64,
}

/// Per-level potentials (J) on the grid plus level couplings, in the frame that
/// rotates with each driving field.
///
/// Each coupling fixes the energy offset of level j relative to level i to
/// −ħ·detuning. Offsets are propagated through the coupling graph from the
/// lowest-index level of each connected component. A loop whose detunings do not
/// add up is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedHamiltonian {
    pub grid: SpatialGrid,
    pub mass: f64,
    pub potentials: Vec<Vec<f64>>,
    pub couplings: Vec<Coupling>,
    offsets: Vec<f64>,
}

impl DressedHamiltonian {
    pub fn new(
        grid: SpatialGrid,
        mass: f64,
        potentials: Vec<Vec<f64>>,
        couplings: Vec<Coupling>,
    ) -> Result<Self, PropagatorError> {
        let offsets = frame_offsets(potentials.len(), &couplings)?;
        let h = Self { grid, mass, potentials, couplings, offsets };
        h.validate()?;
        Ok(h)
    }

    /// Use explicit frame offsets (J) instead of the ones implied by the
    /// couplings. They must still agree with every coupling's detuning.
    pub fn with_offsets(mut self, offsets: Vec<f64>) -> Result<Self, PropagatorError> {
        if offsets.len() != self.levels() {
            return Err(PropagatorError::InvalidHamiltonian("one offset per level required".into()));
        }
        for c in &self.couplings {
            let want = offsets[c.i] - HBAR * c.detuning;
            if !close(offsets[c.j], want) {
                return Err(PropagatorError::InconsistentDetuning(c.i, c.j));
            }
        }
        self.offsets = offsets;
        Ok(self)
    }

    fn validate(&self) -> Result<(), PropagatorError> {
        self.grid.validate()?;
        if !(self.mass > 0.0) {
            return Err(PropagatorError::InvalidHamiltonian("mass must be positive".into()));
        }
        if self.potentials.is_empty() {
            return Err(PropagatorError::InvalidHamiltonian("at least one level required".into()));
        }
        for (l, v) in self.potentials.iter().enumerate() {
            if v.len() != self.grid.size() {
                return Err(PropagatorError::InvalidHamiltonian(format!(
                    "potential {l} has {} points, grid has {}",
                    v.len(),
                    self.grid.size()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(PropagatorError::InvalidHamiltonian(format!("potential {l} is not finite")));
            }
        }
        for c in &self.couplings {
            if c.i >= self.levels() || c.j >= self.levels() || c.i == c.j {
                return Err(PropagatorError::InvalidHamiltonian(format!("bad coupling {}-{}", c.i, c.j)));
            }
            if !(c.rabi.is_finite() && c.detuning.is_finite()) {
                return Err(PropagatorError::InvalidHamiltonian("coupling not finite".into()));
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.potentials.len()
    }

    /// Rotating-frame energy offset of each level, J.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Diagonal of level `l`: potential plus frame offset.
    pub fn diagonal(&self, l: usize) -> Vec<f64> {
        self.potentials[l].iter().map(|v| v + self.offsets[l]).collect()
    }

    /// Bounds (E_min, E_max) on the spectrum in J: the kinetic, diagonal and
    /// coupling parts are bounded separately and added.
    pub fn spectral_range(&self) -> (f64, f64) {
        let k_max = self.grid.kinetic_energies(self.mass).into_iter().fold(0.0, f64::max);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for l in 0..self.levels() {
            for v in self.diagonal(l) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let c: f64 = self.couplings.iter().map(|c| 0.5 * HBAR * c.rabi.abs()).sum();
        (lo - c, hi + k_max + c)
    }

    pub fn check_state(&self, psi: &MultiLevelWavefunction) -> Result<(), PropagatorError> {
        if psi.levels != self.levels() || psi.grid != self.grid {
            return Err(PropagatorError::Mismatch(format!(
                "state has {} levels on {:?}, Hamiltonian has {} on {:?}",
                psi.levels,
                psi.grid,
                self.levels(),
                self.grid
            )));
        }
        Ok(())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-40
}

fn frame_offsets(levels: usize, couplings: &[Coupling]) -> Result<Vec<f64>, PropagatorError> {
    let mut offsets: Vec<Option<f64>> = vec![None; levels];
    for root in 0..levels {
        if offsets[root].is_some() {
            continue;
        }
        offsets[root] = Some(0.0);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            let here = offsets[n].expect("visited");
            for c in couplings {
                if c.i >= levels || c.j >= levels {
                    return Err(PropagatorError::InvalidHamiltonian(format!("bad coupling {}-{}", c.i, c.j)));
                }
                let (other, value) = if c.i == n {
                    (c.j, here - HBAR * c.detuning)
                } else if c.j == n {
                    (c.i, here + HBAR * c.detuning)
                } else {
                    continue;
                };
                match offsets[other] {
                    None => {
                        offsets[other] = Some(value);
                        queue.push_back(other);
                    }
                    Some(existing) if !close(existing, value) => {
                        return Err(PropagatorError::InconsistentDetuning(n, other));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(offsets.into_iter().map(|o| o.expect("every level visited")).collect())
}

/// Sequence of constant-Hamiltonian segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<(f64, DressedHamiltonian)>,
}

impl PulseSchedule {
    pub fn new(segments: Vec<(f64, DressedHamiltonian)>) -> Result<Self, PropagatorError> {
        if segments.is_empty() {
            return Err(PropagatorError::InvalidHamiltonian("empty schedule".into()));
        }
        for (d, h) in &segments {
            if !(*d > 0.0 && d.is_finite()) {
                return Err(PropagatorError::InvalidTime(*d));
            }
            if h.levels() != segments[0].1.levels() || h.grid != segments[0].1.grid {
                return Err(PropagatorError::Mismatch("segments differ in levels or grid".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|(d, _)| d).sum()
    }
}

/// Forward and inverse FFTs over a 1D or 2D grid, unnormalised.
pub(crate) struct GridFft {
    n: usize,
    dims: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    column: Vec<Complex64>,
}

impl GridFft {
    pub(crate) fn new(grid: &SpatialGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n_points);
        let inv = planner.plan_fft_inverse(grid.n_points);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            n: grid.n_points,
            dims: grid.dimensions,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            column: vec![Complex64::new(0.0, 0.0); grid.n_points],
        }
    }

    fn run(&mut self, data: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        // Rows (the whole buffer in 1D) in one batched call.
        plan.process_with_scratch(data, &mut self.scratch);
        if self.dims == 2 {
            let n = self.n;
            for col in 0..n {
                for row in 0..n {
                    self.column[row] = data[row * n + col];
                }
                plan.process_with_scratch(&mut self.column, &mut self.scratch);
                for row in 0..n {
                    data[row * n + col] = self.column[row];
                }
            }
        }
    }

    pub(crate) fn forward(&mut self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    pub(crate) fn inverse(&mut self, data: &mut [Complex64]) {
        self.run(data, false);
    }
}

/// Applies H (in joules) to flat level-major amplitude vectors.
pub(crate) struct Operator {
    levels: usize,
    size: usize,
    kinetic: Vec<f64>,
    diagonal: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
    fft: GridFft,
    buffer: Vec<Complex64>,
}

impl Operator {
    pub(crate) fn new(h: &DressedHamiltonian) -> Self {
        let size = h.grid.size();
        let norm = 1.0 / size as f64;
        let kinetic = h.grid.kinetic_energies(h.mass).into_iter().map(|e| e * norm).collect();
        let diagonal = (0..h.levels()).flat_map(|l| h.diagonal(l)).collect();
        let couplings = h.couplings.iter().map(|c| (c.i, c.j, 0.5 * HBAR * c.rabi)).collect();
        Self {
            levels: h.levels(),
            size,
            kinetic,
            diagonal,
            couplings,
            fft: GridFft::new(&h.grid),
            buffer: vec![Complex64::new(0.0, 0.0); size],
        }
    }

    /// out = (H − shift)·input / scale
    pub(crate) fn apply_scaled(&mut self, input: &[Complex64], out: &mut [Complex64], shift: f64, scale: f64) {
        let n = self.size;
        let inv_scale = 1.0 / scale;
        for l in 0..self.levels {
            let src = &input[l * n..(l + 1) * n];
            self.buffer.copy_from_slice(src);
            self.fft.forward(&mut self.buffer);
            for (b, k) in self.buffer.iter_mut().zip(&self.kinetic) {
                *b *= *k;
            }
            self.fft.inverse(&mut self.buffer);
            let dst = &mut out[l * n..(l + 1) * n];
            let diag = &self.diagonal[l * n..(l + 1) * n];
            for p in 0..n {
                dst[p] = (self.buffer[p] + src[p] * (diag[p] - shift)) * inv_scale;
            }
        }
        for &(i, j, h) in &self.couplings {
            let hs = h * inv_scale;
            for p in 0..n {
                let a = input[i * n + p];
                let b = input[j * n + p];
                out[i * n + p] += b * hs;
                out[j * n + p] += a * hs;
            }
        }
    }
}
