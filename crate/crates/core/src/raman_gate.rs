//! Two-photon Raman single-qubit gate: rotation matrix, state-averaged
//! fidelity and the seven analytic error mechanisms.
//!
//! Conventions worth knowing before summing anything: the pulse-area error is
//! stated for a π/2 pulse while every other mechanism is stated for a π pulse.
//! [`total_raman_epg`] adds them as they are, without rescaling.

use crate::atomic_data::AtomSpec;
use crate::constants::HBAR;
use crate::lattice::{trap_frequency, LatticeConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Intensity-to-Rabi coefficient for the Cs D1 Raman pair, W⁻¹·m²·s⁻².
pub const RABI_INTENSITY_COEFF: f64 = 8.3e12;
/// Differential light-shift ratio numerator, s⁻¹ (the ratio is this over Δ₁).
pub const STARK_RATIO_NUMERATOR: f64 = 6e10;
/// Validity window of the light-shift ratio, in Δ₁/2π (Hz).
pub const STARK_RATIO_RANGE_HZ: (f64, f64) = (50e9, 5000e9);
/// Shot-noise coefficient at η = 0.5, m²·s⁻¹.
pub const SHOT_NOISE_COEFF: f64 = 2.6e-6;
/// Optical frequency used for photon energy in the shot-noise bound, rad/s.
pub const RAMAN_OPTICAL_OMEGA: f64 = 2.0 * PI * 3.5e14;
/// (8 − 4π + π²)/24, the Doppler-detuning error prefactor.
pub const DOPPLER_PREFACTOR: f64 = (8.0 - 4.0 * PI + PI * PI) / 24.0;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanGateConfig {
    /// Complex two-photon Rabi frequency, rad/s.
    pub omega_r: Complex64,
    pub delta_1: f64,
    pub delta_2: f64,
    /// Two-photon detuning, rad/s.
    pub delta: f64,
    /// Pulse duration, s.
    pub t: f64,
    pub w0: f64,
    pub lambda_r: f64,
    /// Total Raman power, W.
    pub p_r: f64,
    /// Detector quantum efficiency for intensity stabilisation.
    pub eta: f64,
    /// Lifetime of the intermediate level, s.
    pub tau: f64,
}

impl RamanGateConfig {
    /// A resonant π pulse driven through the D1 line of `atom` with total power
    /// `p_r` focused to waist `w0`. The Rabi frequency follows from the peak
    /// intensity 2P/(πw₀²).
    pub fn from_power(atom: &AtomSpec, p_r: f64, w0: f64, delta_1: f64) -> Self {
        let d1 =
            atom.line_by_label("D1").or_else(|| atom.ground_lines().next()).expect("atom has at least one ground line");
        let lambda_r = crate::units::omega_to_wavelength(atom.line_frequency(d1));
        Self::from_power_with(p_r, w0, delta_1, lambda_r, d1.lifetime)
    }

    pub fn from_power_with(p_r: f64, w0: f64, delta_1: f64, lambda_r: f64, tau: f64) -> Self {
        let intensity = 2.0 * p_r / (PI * w0 * w0);
        let rabi = rabi_from_intensity(intensity, delta_1);
        Self {
            omega_r: Complex64::new(rabi, 0.0),
            delta_1,
            delta_2: delta_1,
            delta: 0.0,
            t: PI / rabi,
            w0,
            lambda_r,
            p_r,
            eta: 0.5,
            tau,
        }
    }

    /// Ω' = √(|Ω_R|² + Δ²).
    pub fn effective_rabi(&self) -> f64 {
        (self.omega_r.norm_sqr() + self.delta * self.delta).sqrt()
    }

    /// Human-readable notes when inputs leave the range the formulas were made for.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d_hz = self.delta_1.abs() / (2.0 * PI);
        if d_hz < STARK_RATIO_RANGE_HZ.0 * (1.0 - 1e-9) || d_hz > STARK_RATIO_RANGE_HZ.1 * (1.0 + 1e-9) {
            out.push(format!(
                "Δ₁/2π = {:.3e} Hz is outside the 50-5000 GHz range of the light-shift ratio; extrapolating",
                d_hz
            ));
        }
        if self.omega_r.norm() >= 0.1 * self.delta_1.abs() {
            out.push("|Ω_R| is not small compared to |Δ₁|; the intensity relation is unreliable".into());
        }
        if self.delta_1 == 0.0 {
            out.push("Δ₁ = 0: spontaneous emission diverges".into());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MotionalState {
    pub n_x: u32,
    pub n_y: u32,
}

impl MotionalState {
    pub const GROUND: MotionalState = MotionalState { n_x: 0, n_y: 0 };

    /// (n_x² + n_x + 1) + (n_y² + n_y + 1)
    fn quartic_bracket(self) -> f64 {
        let f = |n: u32| {
            let n = f64::from(n);
            n * n + n + 1.0
        };
        f(self.n_x) + f(self.n_y)
    }

    fn linear_bracket(self) -> f64 {
        f64::from(self.n_x) + f64::from(self.n_y) + 1.0
    }
}

/// Rotation produced by a pulse of two-photon Rabi frequency Ω_R, detuning Δ
/// and duration t.
pub fn rotation_matrix(omega_r: Complex64, delta: f64, t: f64) -> Matrix2 {
    let i = Complex64::i();
    let op = (omega_r.norm_sqr() + delta * delta).sqrt();
    let half = 0.5 * op * t;
    let c = half.cos();
    // sin(Ω't/2)/Ω' with the Ω' → 0 limit t/2.
    let s_over = if op == 0.0 { 0.5 * t } else { half.sin() / op };
    let ph = Complex64::from_polar(1.0, 0.5 * delta * t);
    let phc = ph.conj();
    [
        [ph * (c - i * delta * s_over), i * ph * omega_r.conj() * s_over],
        [i * phc * omega_r * s_over, phc * (c + i * delta * s_over)],
    ]
}

/// State-averaged fidelity of R(θ, φ) against a π pulse about x.
pub fn averaged_pi_fidelity(theta: f64, phi: f64) -> f64 {
    0.5 + ((2.0 * phi).cos() - 2.0 * theta.cos() * phi.cos().powi(2)) / 6.0
}

/// |Ω_R| = 8.3×10¹²·I/|Δ₁|.
pub fn rabi_from_intensity(intensity: f64, delta_1: f64) -> f64 {
    RABI_INTENSITY_COEFF * intensity / delta_1.abs()
}

/// Identity-operation error summed over the four neighbours sharing a beam axis.
pub fn p_neighbor(cfg: &RamanGateConfig, lattice: &LatticeConfig) -> f64 {
    let a = lattice.spacing;
    let w4 = cfg.w0.powi(4);
    let spread = 1.0 + a * a * cfg.lambda_r * cfg.lambda_r / (PI * PI * w4);
    2.0 * PI * PI / 3.0 / (spread * spread) * (-4.0 * a * a / (cfg.w0 * cfg.w0)).exp()
}

/// π/(2|Δ₁|τ).
pub fn p_spontaneous(cfg: &RamanGateConfig) -> f64 {
    PI / (2.0 * cfg.delta_1.abs() * cfg.tau)
}

fn motional_spread(lattice: &LatticeConfig, w0: f64) -> f64 {
    HBAR * HBAR * lattice.spacing.powi(2) / (PI * PI * lattice.mass * lattice.depth * w0.powi(4))
}

/// Variance of the differential light-shift phase for motional state `n`.
pub fn stark_phase_variance(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> f64 {
    let ratio = STARK_RATIO_NUMERATOR / cfg.delta_1;
    motional_spread(lattice, cfg.w0) * ratio * ratio * n.quartic_bracket()
}

/// (2/3)·var(δφ).
pub fn p_ac_stark(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> f64 {
    2.0 / 3.0 * stark_phase_variance(cfg, lattice, n)
}

/// (1/6)·var(|Ω_R|t) for a π/2 pulse.
pub fn p_pulse_area(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> f64 {
    let var = motional_spread(lattice, cfg.w0) * (PI / 2.0).powi(2) * n.quartic_bracket();
    var / 6.0
}

/// (8 − 4π + π²)/24 · var(Δ)/|Ω_R|² with var(Δ) = (2π/λ_R)²(ħω_τ/m)(n_x + n_y + 1).
pub fn p_doppler(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> f64 {
    let k = 2.0 * PI / cfg.lambda_r;
    let var = k * k * HBAR * trap_frequency(lattice) / lattice.mass * n.linear_bracket();
    DOPPLER_PREFACTOR * var / cfg.omega_r.norm_sqr()
}

/// Leakage through the longitudinal field component of a focused beam, summed
/// over the four reachable non-qubit states, for motional state `n`.
pub fn p_polarization_motional(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> f64 {
    let rel = cfg.lambda_r / (PI * cfg.w0 * cfg.w0)
        * (HBAR / (lattice.mass * trap_frequency(lattice)) * n.linear_bracket()).sqrt();
    4.0 * (rel * PI / 2.0).powi(2)
}

/// Ground-state leakage ħλ_R²a/(πw₀⁴√(2mU_L)).
pub fn p_polarization(cfg: &RamanGateConfig, lattice: &LatticeConfig) -> f64 {
    p_polarization_motional(cfg, lattice, MotionalState::GROUND)
}

/// Shot-noise floor on intensity stabilisation: 2.6×10⁻⁶/(|Δ₁|w₀²) at η = 0.5,
/// scaled as 1/η for other detector efficiencies.
pub fn p_shot_noise(cfg: &RamanGateConfig) -> f64 {
    SHOT_NOISE_COEFF * (0.5 / cfg.eta) / (cfg.delta_1.abs() * cfg.w0 * cfg.w0)
}

/// The same floor from photon counting: 2π²ħω_R/(3ηP_R t_π) with t_π = π/|Ω_R|.
pub fn p_shot_noise_from_power(cfg: &RamanGateConfig) -> f64 {
    let t_pi = PI / cfg.omega_r.norm();
    2.0 * PI * PI * HBAR * RAMAN_OPTICAL_OMEGA / (3.0 * cfg.eta * cfg.p_r * t_pi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub name: String,
    pub symbol: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanBudget {
    pub total: f64,
    pub breakdown: Vec<Mechanism>,
    pub warnings: Vec<String>,
}

impl RamanBudget {
    pub fn get(&self, symbol: &str) -> Option<f64> {
        self.breakdown.iter().find(|m| m.symbol == symbol).map(|m| m.value)
    }

    /// The mechanism with the largest contribution.
    pub fn dominant(&self) -> &Mechanism {
        self.breakdown.iter().max_by(|a, b| a.value.total_cmp(&b.value)).expect("breakdown is never empty")
    }
}

/// Sum of all Raman gate-error mechanisms. Storage errors are not included.
pub fn total_raman_epg(cfg: &RamanGateConfig, lattice: &LatticeConfig, n: MotionalState) -> RamanBudget {
    let row = |name: &str, symbol: &str, value: f64| Mechanism { name: name.into(), symbol: symbol.into(), value };
    let breakdown = vec![
        row("Neighbor atom errors", "P_rn", p_neighbor(cfg, lattice)),
        row("Spontaneous emission", "P_rs", p_spontaneous(cfg)),
        row("AC Stark shifts", "P_ra", p_ac_stark(cfg, lattice, n)),
        row("Atomic motion-reduced pulse area", "P_rpa", p_pulse_area(cfg, lattice, n)),
        row("Detuning Doppler shift", "P_rm", p_doppler(cfg, lattice, n)),
        row("Polarization effects", "P_rp", p_polarization_motional(cfg, lattice, n)),
        row("Laser intensity noise", "P_rl", p_shot_noise(cfg)),
    ];
    let warnings = cfg.warnings();
    for w in &warnings {
        log::warn!("{w}");
    }
    RamanBudget { total: breakdown.iter().map(|m| m.value).sum(), breakdown, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DetuningSide;

    fn optimum() -> (RamanGateConfig, LatticeConfig) {
        let atom = AtomSpec::cesium();
        let lattice = LatticeConfig::new(10e-6, 500.0, 851.7e-9, DetuningSide::Blue, 100, 3, atom.mass).unwrap();
        let cfg = RamanGateConfig::from_power_with(10e-3, 5e-6, 2.0 * PI * 5e12, 894e-9, 34.9e-9);
        (cfg, lattice)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() < rel
    }

    #[test]
    fn pi_rotation_is_i_sigma_x() {
        let r = rotation_matrix(Complex64::new(2.0, 0.0), 0.0, PI / 2.0);
        assert!(r[0][0].norm() < 1e-15 && r[1][1].norm() < 1e-15);
        assert!((r[0][1] - Complex64::i()).norm() < 1e-15);
        assert!((r[1][0] - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let r = rotation_matrix(Complex64::new(1.3, -0.4), 0.7, 0.0);
        assert_eq!(r[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(r[0][1], Complex64::new(0.0, 0.0));
        assert_eq!(r[1][1], Complex64::new(1.0, 0.0));
        let z = rotation_matrix(Complex64::new(0.0, 0.0), 0.0, 3.0);
        assert_eq!(z[0][0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn resonant_form_matches_theta_phi() {
        let omega = Complex64::from_polar(3.0, 0.8);
        let t = 0.37;
        let r = rotation_matrix(omega, 0.0, t);
        let theta = 3.0 * t;
        let expect01 = Complex64::i() * Complex64::from_polar(1.0, -0.8) * (theta / 2.0).sin();
        assert!((r[0][1] - expect01).norm() < 1e-15);
        assert!((r[0][0].re - (theta / 2.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        assert!((averaged_pi_fidelity(PI, 0.0) - 1.0).abs() < 1e-15);
        assert!((averaged_pi_fidelity(0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rabi_fixture_and_scaling() {
        let i = 2.0 * 10e-3 / (PI * 25e-12);
        let w = rabi_from_intensity(i, 2.0 * PI * 5e12);
        assert!(close(w, 6.727e7, 1e-3), "{w}");
        assert!(close(rabi_from_intensity(2.0 * i, 2.0 * PI * 5e12), 2.0 * w, 1e-14));
        assert!(close(rabi_from_intensity(i, -4.0 * PI * 5e12), 0.5 * w, 1e-14));
    }

    #[test]
    fn mechanism_fixtures_at_optimum() {
        let (cfg, lat) = optimum();
        assert!(close(p_neighbor(&cfg, &lat), 7.225e-7, 2e-3), "{}", p_neighbor(&cfg, &lat));
        assert!(close(p_spontaneous(&cfg), 1.433e-6, 2e-3));
        assert!(close(p_shot_noise(&cfg), 3.31e-9, 3e-3));
        let b = total_raman_epg(&cfg, &lat, MotionalState::GROUND);
        assert_eq!(b.breakdown.len(), 7);
        assert_eq!(b.dominant().symbol, "P_rp");
        assert!(close(b.total, 1.012e-5, 5e-3), "{}", b.total);
        assert!(b.warnings.is_empty());
    }

    #[test]
    fn motional_brackets() {
        let (cfg, lat) = optimum();
        let g = MotionalState::GROUND;
        let e = MotionalState { n_x: 1, n_y: 1 };
        assert!(close(p_ac_stark(&cfg, &lat, e), 3.0 * p_ac_stark(&cfg, &lat, g), 1e-14));
        assert!(close(p_pulse_area(&cfg, &lat, e), 3.0 * p_pulse_area(&cfg, &lat, g), 1e-14));
        assert!(close(p_doppler(&cfg, &lat, e), 3.0 * p_doppler(&cfg, &lat, g), 1e-14));
    }

    #[test]
    fn shot_noise_routes_agree() {
        // The closed-form shot-noise coefficient assumes I = P/(πw₀²) for the Rabi frequency.
        let (mut cfg, _) = optimum();
        let i = cfg.p_r / (PI * cfg.w0 * cfg.w0);
        cfg.omega_r = Complex64::new(rabi_from_intensity(i, cfg.delta_1), 0.0);
        let a = p_shot_noise(&cfg);
        let b = p_shot_noise_from_power(&cfg);
        assert!(close(a, b, 0.02), "{a} vs {b}");
    }

    #[test]
    fn warnings_outside_validity() {
        let (mut cfg, lat) = optimum();
        cfg.delta_1 = 2.0 * PI * 10e9;
        let b = total_raman_epg(&cfg, &lat, MotionalState::GROUND);
        assert!(!b.warnings.is_empty());
    }
}
