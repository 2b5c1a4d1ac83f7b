//! Optical response of ground-manifold sublevels: Kramers-Heisenberg Raman and
//! Rayleigh cross sections, dynamic scalar-plus-vector polarizability, wavelength
//! sweeps and magic-wavelength search.
//!
//! Intermediate states are every hyperfine sublevel of every fine level reached
//! from the ground level by a listed line, so the denominators resolve hyperfine
//! structure in both manifolds. Denominators are real; the model refuses to
//! evaluate inside a window of `window_linewidths` natural linewidths around any
//! intermediate resonance.

use crate::angular::{hyperfine_dipole_element, AngularError, HalfInteger};
use crate::atomic_data::{AtomSpec, Sublevel};
use crate::constants::{ALPHA_FS, C, E_CHARGE, HBAR};
use crate::units::{omega_to_wavelength, wavelength_to_omega};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error(
        "ω = {omega:.6e} rad/s ({lambda_nm:.4} nm) lies within {window:.3e} rad/s of a resonance at {resonance:.6e} rad/s"
    )]
    ResonanceProximity { omega: f64, lambda_nm: f64, resonance: f64, window: f64 },
    #[error("sublevel is not in the ground fine level")]
    NotGroundState,
    #[error("angular frequency must be positive and finite, got {0}")]
    InvalidFrequency(f64),
    #[error("α(λ⁺) + α(λ⁻) does not change sign across [{lo_nm}, {hi_nm}] nm")]
    NoSignChange { lo_nm: f64, hi_nm: f64 },
    #[error(transparent)]
    Angular(#[from] AngularError),
}

/// Spherical polarization index q of the incoming light.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polarization {
    q: i32,
}

impl Polarization {
    pub const SIGMA_PLUS: Polarization = Polarization { q: 1 };
    pub const PI: Polarization = Polarization { q: 0 };
    pub const SIGMA_MINUS: Polarization = Polarization { q: -1 };

    pub fn new(q: i32) -> Result<Self, AngularError> {
        if (-1..=1).contains(&q) {
            Ok(Self { q })
        } else {
            Err(AngularError::InvalidPolarization(q))
        }
    }

    pub fn q(self) -> i32 {
        self.q
    }
}

/// One row of a wavelength sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub lambda: f64,
    pub omega: f64,
    pub sigma_raman: f64,
    pub sigma_rayleigh: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
struct Intermediate {
    state: Sublevel,
    reduced: f64,
    linewidth: f64,
}

/// Response calculator bound to one atom. Cheap to clone; immutable once built.
#[derive(Debug, Clone)]
pub struct ResponseModel {
    atom: AtomSpec,
    window_linewidths: f64,
    ground: Vec<Sublevel>,
    intermediates: Vec<Intermediate>,
}

/// Default half-width of the excluded window around each resonance, in natural linewidths.
pub const DEFAULT_WINDOW_LINEWIDTHS: f64 = 100.0;

impl ResponseModel {
    pub fn new(atom: &AtomSpec) -> Self {
        Self::with_window(atom, DEFAULT_WINDOW_LINEWIDTHS)
    }

    pub fn with_window(atom: &AtomSpec, window_linewidths: f64) -> Self {
        let g = atom.ground_index();
        let ground = atom.sublevels(g);
        let intermediates = atom
            .ground_lines()
            .flat_map(|line| {
                atom.sublevels(line.upper).into_iter().map(move |state| Intermediate {
                    state,
                    reduced: line.reduced_element,
                    linewidth: 1.0 / line.lifetime,
                })
            })
            .collect();
        Self { atom: atom.clone(), window_linewidths, ground, intermediates }
    }

    pub fn atom(&self) -> &AtomSpec {
        &self.atom
    }

    pub fn window_linewidths(&self) -> f64 {
        self.window_linewidths
    }

    /// Ground-manifold sublevels in (F, m_F) order.
    pub fn ground_sublevels(&self) -> &[Sublevel] {
        &self.ground
    }

    fn check_ground(&self, s: &Sublevel) -> Result<(), ResponseError> {
        if s.level != self.atom.ground_index() {
            return Err(ResponseError::NotGroundState);
        }
        if s.m_f.twice_value.abs() > s.f.twice_value {
            return Err(AngularError::InvalidSublevel { f: s.f, m: s.m_f }.into());
        }
        Ok(())
    }

    fn check_frequency(&self, a: &Sublevel, omega: f64) -> Result<(), ResponseError> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ResponseError::InvalidFrequency(omega));
        }
        for i in &self.intermediates {
            let w_ia = i.state.energy - a.energy;
            let window = self.window_linewidths * i.linewidth;
            if (w_ia - omega).abs() < window {
                return Err(ResponseError::ResonanceProximity {
                    omega,
                    lambda_nm: omega_to_wavelength(omega) * 1e9,
                    resonance: w_ia,
                    window,
                });
            }
        }
        Ok(())
    }

    /// ⟨bra| x·ε_q* |ket⟩ with the bra in the ground manifold.
    fn element(&self, bra: &Sublevel, ket: &Intermediate, q: i32) -> f64 {
        hyperfine_dipole_element(bra, &ket.state, q, ket.reduced, self.atom.nuclear_spin).expect("validated sublevels")
    }

    fn cross_section_unchecked(&self, a: &Sublevel, b: &Sublevel, omega: f64, q: i32) -> f64 {
        let omega_out = omega - (b.energy - a.energy);
        if omega_out <= 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for qp in -1..=1 {
            // Only intermediates with m_i = m_a + q contribute to the resonant
            // path and m_i = m_a - q' to the anti-resonant one.
            let mut amp = 0.0;
            let parity = if (q + qp) % 2 == 0 { 1.0 } else { -1.0 };
            for i in &self.intermediates {
                let w_ia = i.state.energy - a.energy;
                let res = self.element(a, i, q) * self.element(b, i, qp);
                let anti = parity * self.element(b, i, -q) * self.element(a, i, -qp);
                if res != 0.0 {
                    amp += res / (w_ia - omega);
                }
                if anti != 0.0 {
                    amp += anti / (w_ia + omega_out);
                }
            }
            total += amp * amp;
        }
        8.0 * PI / 3.0 * ALPHA_FS * ALPHA_FS * omega * omega_out.powi(3) / (C * C) * total
    }

    /// σ_ab for incoming light of angular frequency `omega` and polarization `eps`,
    /// summed over the scattered photon's spherical components.
    pub fn cross_section(
        &self,
        a: &Sublevel,
        b: &Sublevel,
        omega: f64,
        eps: Polarization,
    ) -> Result<f64, ResponseError> {
        self.check_ground(a)?;
        self.check_ground(b)?;
        self.check_frequency(a, omega)?;
        Ok(self.cross_section_unchecked(a, b, omega, eps.q))
    }

    /// Σ_{b≠a} σ_ab.
    pub fn raman_cross_section(&self, a: &Sublevel, omega: f64, eps: Polarization) -> Result<f64, ResponseError> {
        Ok(self.raman_channels(a, omega, eps)?.iter().map(|(_, s)| s).sum())
    }

    /// σ_aa.
    pub fn rayleigh_cross_section(&self, a: &Sublevel, omega: f64, eps: Polarization) -> Result<f64, ResponseError> {
        self.cross_section(a, a, omega, eps)
    }

    /// Per-final-state Raman cross sections σ_ab for every b ≠ a.
    pub fn raman_channels(
        &self,
        a: &Sublevel,
        omega: f64,
        eps: Polarization,
    ) -> Result<Vec<(Sublevel, f64)>, ResponseError> {
        self.check_ground(a)?;
        self.check_frequency(a, omega)?;
        Ok(self
            .ground
            .iter()
            .filter(|b| !(b.f == a.f && b.m_f == a.m_f))
            .map(|b| (*b, self.cross_section_unchecked(a, b, omega, eps.q)))
            .collect())
    }

    /// Fraction of Raman scattering out of `a` that lands in `partner`
    /// (the other qubit state), i.e. the bit-flip share. The rest is leakage.
    pub fn bit_flip_fraction(
        &self,
        a: &Sublevel,
        partner: &Sublevel,
        omega: f64,
        eps: Polarization,
    ) -> Result<f64, ResponseError> {
        let channels = self.raman_channels(a, omega, eps)?;
        let total: f64 = channels.iter().map(|(_, s)| s).sum();
        let flip: f64 = channels.iter().filter(|(b, _)| b.f == partner.f && b.m_f == partner.m_f).map(|(_, s)| s).sum();
        Ok(if total > 0.0 { flip / total } else { 0.0 })
    }

    /// Dynamic polarizability of `a` in C²·m²·J⁻¹.
    pub fn polarizability(&self, a: &Sublevel, omega: f64, eps: Polarization) -> Result<f64, ResponseError> {
        self.check_ground(a)?;
        self.check_frequency(a, omega)?;
        let q = eps.q;
        let mut sum = 0.0;
        for i in &self.intermediates {
            let w_ia = i.state.energy - a.energy;
            let up = self.element(a, i, q);
            let down = self.element(a, i, -q);
            if up != 0.0 {
                sum += up * up / (w_ia - omega);
            }
            if down != 0.0 {
                sum += down * down / (w_ia + omega);
            }
        }
        Ok(E_CHARGE * E_CHARGE / HBAR * sum)
    }

    /// Full response at one vacuum wavelength.
    pub fn point(&self, a: &Sublevel, lambda: f64, eps: Polarization) -> Result<ResponsePoint, ResponseError> {
        let omega = wavelength_to_omega(lambda);
        Ok(ResponsePoint {
            lambda,
            omega,
            sigma_raman: self.raman_cross_section(a, omega, eps)?,
            sigma_rayleigh: self.rayleigh_cross_section(a, omega, eps)?,
            alpha: self.polarizability(a, omega, eps)?,
        })
    }

    /// Uniform wavelength grid from `lambda_min` to `lambda_max` (inclusive).
    /// Points inside a resonance window are dropped, leaving gaps.
    pub fn sweep(
        &self,
        a: &Sublevel,
        eps: Polarization,
        lambda_min: f64,
        lambda_max: f64,
        n_points: usize,
    ) -> Result<Vec<ResponsePoint>, ResponseError> {
        self.check_ground(a)?;
        let grid: Vec<f64> = match n_points {
            0 => Vec::new(),
            1 => vec![lambda_min],
            n => (0..n).map(|k| lambda_min + (lambda_max - lambda_min) * k as f64 / (n - 1) as f64).collect(),
        };
        let points: Vec<Result<Option<ResponsePoint>, ResponseError>> = grid
            .par_iter()
            .map(|&l| match self.point(a, l, eps) {
                Ok(p) => Ok(Some(p)),
                Err(ResponseError::ResonanceProximity { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            out.extend(p?);
        }
        Ok(out)
    }

    /// Wavelength at which α(s_plus) + α(s_minus) = 0, by bisection to 1e-4 nm.
    pub fn find_magic_wavelength(
        &self,
        s_plus: &Sublevel,
        s_minus: &Sublevel,
        eps: Polarization,
        bracket: (f64, f64),
    ) -> Result<f64, ResponseError> {
        let f = |lambda: f64| -> Result<f64, ResponseError> {
            let w = wavelength_to_omega(lambda);
            Ok(self.polarizability(s_plus, w, eps)? + self.polarizability(s_minus, w, eps)?)
        };
        let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
        let mut f_lo = f(lo)?;
        let f_hi = f(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(ResponseError::NoSignChange { lo_nm: lo * 1e9, hi_nm: hi * 1e9 });
        }
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            let f_mid = f(mid)?;
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Shorthand used by callers that address ground states by (F, m_F) integers.
pub fn ground_state(atom: &AtomSpec, f: i32, m_f: i32) -> Sublevel {
    atom.sublevel(atom.ground_index(), HalfInteger::from_int(f), HalfInteger::from_int(m_f))
        .unwrap_or_else(|| panic!("no ground sublevel F={f}, m_F={m_f}"))
}
