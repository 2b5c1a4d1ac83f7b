//! Dense reference propagator: builds H as an explicit Hermitian matrix and
//! exponentiates it through its eigendecomposition.

use crate::hamiltonian::DressedHamiltonian;
use crate::wavefunction::MultiLevelWavefunction;
use crate::PropagatorError;
use alqc_core::constants::HBAR;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest basis (grid points × levels) the dense path accepts.
pub const ORACLE_CAP: usize = 256;

/// Kinetic matrix element between grid points a and b written as a direct
/// sum over plane waves.
fn kinetic_matrix(h: &DressedHamiltonian) -> DMatrix<Complex64> {
    let g = &h.grid;
    let size = g.size();
    let energies = g.kinetic_energies(h.mass);
    let k = g.wavenumbers();
    let n = g.n_points;
    let mut m = DMatrix::zeros(size, size);
    for a in 0..size {
        let (xa, ya) = g.coords(a);
        for b in 0..size {
            let (xb, yb) = g.coords(b);
            let mut s = Complex64::new(0.0, 0.0);
            for (q, e) in energies.iter().enumerate() {
                let (kx, ky) = if g.dimensions == 1 { (k[q], 0.0) } else { (k[q % n], k[q / n]) };
                s += Complex64::from_polar(*e, kx * (xa - xb) + ky * (ya - yb));
            }
            m[(a, b)] = s / size as f64;
        }
    }
    m
}

pub fn dense_hamiltonian(h: &DressedHamiltonian) -> Result<DMatrix<Complex64>, PropagatorError> {
    let size = h.grid.size();
    let dim = size * h.levels();
    if dim > ORACLE_CAP {
        return Err(PropagatorError::GridTooLarge { size: dim, cap: ORACLE_CAP });
    }
    let kin = kinetic_matrix(h);
    let mut m = DMatrix::zeros(dim, dim);
    for l in 0..h.levels() {
        let diag = h.diagonal(l);
        for a in 0..size {
            for b in 0..size {
                m[(l * size + a, l * size + b)] = kin[(a, b)];
            }
            m[(l * size + a, l * size + a)] += Complex64::new(diag[a], 0.0);
        }
    }
    for c in &h.couplings {
        let v = Complex64::new(0.5 * HBAR * c.rabi, 0.0);
        for p in 0..size {
            m[(c.i * size + p, c.j * size + p)] += v;
            m[(c.j * size + p, c.i * size + p)] += v;
        }
    }
    Ok(m)
}

/// exp(−iH·dt/ħ)·ψ by full diagonalisation.
pub fn oracle_propagate(
    psi: &MultiLevelWavefunction,
    h: &DressedHamiltonian,
    dt: f64,
) -> Result<MultiLevelWavefunction, PropagatorError> {
    h.check_state(psi)?;
    if !dt.is_finite() {
        return Err(PropagatorError::InvalidTime(dt));
    }
    let m = dense_hamiltonian(h)?;
    // Work in units of the largest element so the eigensolver sees O(1) numbers.
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let eig = (m / Complex64::new(scale, 0.0)).symmetric_eigen();
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * DVector::from_column_slice(&psi.data);
    let evolved = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, e)| c * Complex64::from_polar(1.0, -e * scale * dt / HBAR)),
    );
    let out = v * evolved;
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(PropagatorError::Numerical("eigendecomposition produced non-finite values".into()));
    }
    let mut res = psi.clone();
    res.data.copy_from_slice(out.as_slice());
    Ok(res)
}
