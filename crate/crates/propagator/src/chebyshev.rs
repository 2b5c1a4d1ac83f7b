//! Chebyshev expansion of the time-evolution operator.

use crate::bessel::bessel_j_sequence;
use crate::grid::SpatialGrid;
use crate::hamiltonian::{DressedHamiltonian, GridFft, Operator};
use crate::wavefunction::MultiLevelWavefunction;
use crate::PropagatorError;
use alqc_core::constants::HBAR;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// Truncate once Bessel coefficients stay below this.
    pub tolerance: f64,
    /// Largest expansion order per step. Longer steps are subdivided.
    pub max_order: usize,
    /// Reject input states with population near the momentum cutoff.
    pub check_resolution: bool,
    /// Allowed population fraction above 0.9·k_max.
    pub resolution_threshold: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self { tolerance: 1e-14, max_order: 100_000, check_resolution: true, resolution_threshold: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationStats {
    pub order: usize,
    pub substeps: usize,
    pub alpha: f64,
}

/// Fraction of the population with |k| > 0.9·k_max along any axis.
pub fn momentum_edge_fraction(psi: &MultiLevelWavefunction) -> f64 {
    let g: SpatialGrid = psi.grid;
    let k = g.wavenumbers();
    let cut = 0.9 * g.k_max();
    let n = g.n_points;
    let mut fft = GridFft::new(&g);
    let mut total = 0.0;
    let mut edge = 0.0;
    for l in 0..psi.levels {
        let mut buf = psi.level(l).to_vec();
        fft.forward(&mut buf);
        for (idx, a) in buf.iter().enumerate() {
            let p = a.norm_sqr();
            total += p;
            let far = match g.dimensions {
                1 => k[idx].abs() > cut,
                _ => k[idx % n].abs() > cut || k[idx / n].abs() > cut,
            };
            if far {
                edge += p;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Smallest order past |α| where every remaining coefficient is below `tol`.
fn truncation_order(alpha: f64, tol: f64) -> (usize, Vec<f64>) {
    let a = alpha.abs();
    let mut guess = a.ceil() as usize + 40 + (8.0 * a.cbrt()) as usize;
    loop {
        let j = bessel_j_sequence(alpha, guess);
        let first = a.floor() as usize;
        // Coefficients decay monotonically past |α|; find the first small one.
        if let Some(k) = (first..=guess).find(|&k| j[k].abs() < tol && (k + 1 > guess || j[k + 1].abs() < tol)) {
            let mut j = j;
            j.truncate(k + 1);
            return (k, j);
        }
        guess *= 2;
    }
}

/// Propagate `psi` for `dt` seconds under a time-independent Hamiltonian.
pub fn propagate(
    psi: &MultiLevelWavefunction,
    h: &DressedHamiltonian,
    dt: f64,
    opts: &PropagateOptions,
) -> Result<(MultiLevelWavefunction, PropagationStats), PropagatorError> {
    h.check_state(psi)?;
    if !dt.is_finite() {
        return Err(PropagatorError::InvalidTime(dt));
    }
    if opts.check_resolution {
        let f = momentum_edge_fraction(psi);
        if f > opts.resolution_threshold {
            return Err(PropagatorError::GridUnderresolved { fraction: f });
        }
    }
    let mut out = psi.clone();
    if dt == 0.0 {
        return Ok((out, PropagationStats { order: 0, substeps: 0, alpha: 0.0 }));
    }
    let (lo, hi) = h.spectral_range();
    let center = 0.5 * (lo + hi);
    // Small margin so rounding never pushes eigenvalues outside [-1, 1].
    let half = (0.5 * (hi - lo)).max(1e-300) * (1.0 + 1e-6);
    let alpha_total = half * dt / HBAR;
    let cap = opts.max_order.max(8);
    let substeps = ((alpha_total.abs() / (0.5 * cap as f64)).ceil() as usize).max(1);
    let step = dt / substeps as f64;
    let alpha = half * step / HBAR;
    let (order, j) = truncation_order(alpha, opts.tolerance);
    if order > cap {
        return Err(PropagatorError::ToleranceUnreachable { needed: order, cap });
    }
    let coeffs: Vec<Complex64> = j
        .iter()
        .enumerate()
        .map(|(k, &jk)| {
            let w = if k == 0 { 1.0 } else { 2.0 };
            // (−i)^k
            let phase = match k % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
            phase * (w * jk)
        })
        .collect();
    let global = Complex64::from_polar(1.0, -center * step / HBAR);

    let mut op = Operator::new(h);
    let len = out.data.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut prev = vec![zero; len];
    let mut cur = vec![zero; len];
    let mut next = vec![zero; len];
    let mut acc = vec![zero; len];
    for _ in 0..substeps {
        prev.copy_from_slice(&out.data);
        for (a, p) in acc.iter_mut().zip(&prev) {
            *a = coeffs[0] * p;
        }
        if order >= 1 {
            op.apply_scaled(&prev, &mut cur, center, half);
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a += coeffs[1] * c;
            }
        }
        for ck in coeffs.iter().take(order + 1).skip(2) {
            op.apply_scaled(&cur, &mut next, center, half);
            for ((nx, p), a) in next.iter_mut().zip(&prev).zip(acc.iter_mut()) {
                *nx = 2.0 * *nx - p;
                *a += ck * *nx;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        for (o, a) in out.data.iter_mut().zip(&acc) {
            *o = a * global;
        }
    }
    Ok((out, PropagationStats { order, substeps, alpha }))
}
