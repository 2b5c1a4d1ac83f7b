//! Bound motional states of a single level on the grid.

use crate::grid::SpatialGrid;
use crate::PropagatorError;
use alqc_core::constants::HBAR;
use nalgebra::DMatrix;
use serde::Serialize;

/// Lowest motional eigenstates, normalised so Σ|φ|²·cell = 1, with energies in J.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionalBasis {
    pub energies: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Diagonalise kinetic plus `potential` on a 1D grid and keep the `count`
/// lowest states. The spectral kinetic operator is circulant, so only one row
/// needs computing.
pub fn eigenstates_1d(
    grid: &SpatialGrid,
    potential: &[f64],
    mass: f64,
    count: usize,
) -> Result<MotionalBasis, PropagatorError> {
    if grid.dimensions != 1 {
        return Err(PropagatorError::InvalidGrid("eigenstates_1d needs a 1D grid".into()));
    }
    let n = grid.n_points;
    if potential.len() != n || count == 0 || count > n {
        return Err(PropagatorError::Mismatch("potential length or state count".into()));
    }
    let dx = grid.spacing();
    let k = grid.wavenumbers();
    let row: Vec<f64> = (0..n)
        .map(|d| {
            let s: f64 = k.iter().map(|&kk| HBAR * HBAR * kk * kk / (2.0 * mass) * (kk * d as f64 * dx).cos()).sum();
            s / n as f64
        })
        .collect();
    let scale = row[0].abs().max(potential.iter().fold(0.0, |m, v| f64::max(m, v.abs()))).max(1e-300);
    let m = DMatrix::from_fn(n, n, |a, b| {
        let d = (a as isize - b as isize).rem_euclid(n as isize) as usize;
        (row[d] + if a == b { potential[a] } else { 0.0 }) / scale
    });
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let norm = 1.0 / dx.sqrt();
    let mut energies = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        energies.push(eig.eigenvalues[idx] * scale);
        let col = eig.eigenvectors.column(idx);
        // Fix the sign so the largest-magnitude sample is positive.
        let peak = col.iter().fold(0.0, |m: f64, v| if v.abs() > m.abs() { *v } else { m });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        states.push(col.iter().map(|v| v * norm * sign).collect());
    }
    Ok(MotionalBasis { energies, states })
}

/// Product states of a separable 2D potential V(x) + V(y) built from the 1D
/// basis, keeping the `count` lowest energy sums.
pub fn product_states_2d(axis: &MotionalBasis, count: usize) -> MotionalBasis {
    let m = axis.states.len();
    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| {
        (axis.energies[a.0] + axis.energies[a.1]).total_cmp(&(axis.energies[b.0] + axis.energies[b.1])).then(a.cmp(b))
    });
    let mut energies = Vec::new();
    let mut states = Vec::new();
    for &(ix, iy) in pairs.iter().take(count) {
        energies.push(axis.energies[ix] + axis.energies[iy]);
        let fx = &axis.states[ix];
        let fy = &axis.states[iy];
        let mut s = Vec::with_capacity(fx.len() * fy.len());
        for vy in fy {
            for vx in fx {
                s.push(vx * vy);
            }
        }
        states.push(s);
    }
    MotionalBasis { energies, states }
}
