//! System-level analysis: constrained minimisation of the Raman gate error,
//! the error surface over lattice constant and beam waist, Rydberg cross-talk
//! density and lattice scaling reports.

use crate::atomic_data::Sublevel;
use crate::lattice::{storage_epg, storage_scatter_rate, LatticeConfig, LatticeError, PowerModel, StorageContext};
use crate::optimize::{latin_hypercube, nelder_mead, NelderMeadOptions};
use crate::raman_gate::{total_raman_epg, MotionalState, RamanBudget, RamanGateConfig};
use crate::response::{Polarization, ResponseModel};
use crate::units::microkelvin_to_joule;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BudgetError {
    #[error("invalid optimisation box: {0}")]
    InvalidBox(String),
    #[error("objective is not finite at the best point found ({0:?})")]
    NonFinite(Vec<f64>),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Search box for the Raman optimisation. The lower bounds on a, U_L and Δ₁ are
/// not constraints of the physical problem; they keep the search in the region
/// where every mechanism is finite and the light-shift fit applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationBox {
    /// Total Raman power, W.
    pub p_max: f64,
    pub a_max: f64,
    pub u_l_max: f64,
    pub delta1_max: f64,
    pub w0_range: (f64, f64),
    pub a_min: f64,
    pub u_l_min: f64,
    pub delta1_min: f64,
}

impl OptimizationBox {
    /// 10 mW, a ≤ 10 μm, U_L ≤ 500 μK, |Δ₁| ≤ 2π·5 THz, w₀ ∈ [0.5, 50] μm.
    pub fn standard() -> Self {
        Self {
            p_max: 10e-3,
            a_max: 10e-6,
            u_l_max: microkelvin_to_joule(500.0),
            delta1_max: 2.0 * PI * 5e12,
            w0_range: (0.5e-6, 50e-6),
            a_min: 1e-6,
            u_l_min: microkelvin_to_joule(10.0),
            delta1_min: 2.0 * PI * 50e9,
        }
    }

    /// 10 W with every bound opened far beyond realistic values.
    pub fn loose_high_power() -> Self {
        Self {
            p_max: 10.0,
            a_max: 1e-3,
            u_l_max: microkelvin_to_joule(1e5),
            delta1_max: 2.0 * PI * 1e15,
            w0_range: (0.5e-6, 1e-2),
            ..Self::standard()
        }
    }

    pub fn validate(&self) -> Result<(), BudgetError> {
        let pairs = [
            ("a", self.a_min, self.a_max),
            ("U_L", self.u_l_min, self.u_l_max),
            ("Delta1", self.delta1_min, self.delta1_max),
            ("w0", self.w0_range.0, self.w0_range.1),
        ];
        if !(self.p_max > 0.0) {
            return Err(BudgetError::InvalidBox("P_max must be positive".into()));
        }
        for (name, lo, hi) in pairs {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(BudgetError::InvalidBox(format!("{name}: need 0 < min <= max")));
            }
        }
        Ok(())
    }

    /// Lower bounds in optimiser order (a, w₀, Δ₁, U_L).
    pub fn lower(&self) -> [f64; 4] {
        [self.a_min, self.w0_range.0, self.delta1_min, self.u_l_min]
    }

    pub fn upper(&self) -> [f64; 4] {
        [self.a_max, self.w0_range.1, self.delta1_max, self.u_l_max]
    }
}

/// Fixed quantities of the Raman objective that are not optimised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanContext {
    pub lambda_r: f64,
    pub tau: f64,
    pub eta: f64,
    pub mass: f64,
    pub motional: MotionalState,
}

impl RamanContext {
    /// Cs D1 Raman beams (λ_R = 894 nm, τ = 34.9 ns), η = 0.5, ground motional state.
    pub fn cesium() -> Self {
        Self {
            lambda_r: 894e-9,
            tau: 34.9e-9,
            eta: 0.5,
            mass: crate::AtomSpec::cesium().mass,
            motional: MotionalState::GROUND,
        }
    }

    pub fn gate(&self, p_r: f64, w0: f64, delta_1: f64) -> RamanGateConfig {
        let mut g = RamanGateConfig::from_power_with(p_r, w0, delta_1, self.lambda_r, self.tau);
        g.eta = self.eta;
        g
    }

    pub fn lattice(&self, a: f64, u_l: f64) -> LatticeConfig {
        LatticeConfig {
            spacing: a,
            depth: u_l,
            wavelength: 851.7e-9,
            side: crate::lattice::DetuningSide::Blue,
            sites_per_axis: 1,
            dimensions: 3,
            mass: self.mass,
        }
    }

    /// Full breakdown at (a, w₀, Δ₁, U_L) with Ω_R fixed by the power.
    pub fn evaluate(&self, p_r: f64, a: f64, w0: f64, delta_1: f64, u_l: f64) -> RamanBudget {
        total_raman_epg(&self.gate(p_r, w0, delta_1), &self.lattice(a, u_l), self.motional)
    }

    fn objective(&self, p_r: f64, a: f64, w0: f64, delta_1: f64, u_l: f64) -> f64 {
        let g = self.gate(p_r, w0, delta_1);
        let l = self.lattice(a, u_l);
        let n = self.motional;
        use crate::raman_gate::*;
        p_neighbor(&g, &l)
            + p_spontaneous(&g)
            + p_ac_stark(&g, &l, n)
            + p_pulse_area(&g, &l, n)
            + p_doppler(&g, &l, n)
            + p_polarization_motional(&g, &l, n)
            + p_shot_noise(&g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub starts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { starts: 16, seed: 2024, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub a: f64,
    pub w0: f64,
    pub delta_1: f64,
    pub u_l: f64,
    pub omega_r: f64,
    pub epg: f64,
    pub breakdown: RamanBudget,
    /// No ±2% per-axis perturbation improves the objective by more than 0.5%.
    pub certified: bool,
    /// Largest relative improvement found by the perturbation check (≤ 0 means none).
    pub best_perturbation_gain: f64,
    /// Final objective value from each start, in start order.
    pub start_values: Vec<f64>,
    /// Which parameters sit on a box bound, as (name, "lower" | "upper").
    pub at_bounds: Vec<(String, String)>,
}

// u ↦ log-parameter with lo + (hi − lo)(1 − cos u)/2. The map is smooth,
// periodic, and reaches both bounds with zero slope, which lets the simplex
// settle exactly on a bound.
fn decode(u: &[f64], bx: &OptimizationBox) -> [f64; 4] {
    let lo = bx.lower();
    let hi = bx.upper();
    let mut out = [0.0; 4];
    for k in 0..4 {
        let (l, h) = (lo[k].ln(), hi[k].ln());
        out[k] = (l + (h - l) * 0.5 * (1.0 - u[k].cos())).exp().clamp(lo[k], hi[k]);
    }
    out
}

fn encode(s: f64) -> f64 {
    (1.0 - 2.0 * s).clamp(-1.0, 1.0).acos()
}

/// Minimise the Raman gate error over (a, w₀, Δ₁, U_L) with Ω_R eliminated
/// through the beam power.
pub fn minimize_raman_epg(
    bx: &OptimizationBox,
    ctx: &RamanContext,
    settings: &OptimizerSettings,
) -> Result<OptimumReport, BudgetError> {
    bx.validate()?;
    let p = bx.p_max;
    let f = |u: &[f64]| {
        let [a, w0, d1, ul] = decode(u, bx);
        ctx.objective(p, a, w0, d1, ul).ln()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let starts = latin_hypercube(settings.starts.max(1), 4, &mut rng);
    let opts = NelderMeadOptions { max_evals: settings.max_evals, ..Default::default() };
    let results: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|s| {
            let u0: Vec<f64> = s.iter().map(|&v| encode(v)).collect();
            let first = nelder_mead(f, &u0, &opts);
            // A fresh simplex around the first answer guards against collapse.
            let second = nelder_mead(f, &first.x, &NelderMeadOptions { initial_step: 0.05, ..opts });
            if second.f <= first.f {
                (second.x, second.f)
            } else {
                (first.x, first.f)
            }
        })
        .collect();

    let start_values: Vec<f64> = results.iter().map(|(_, v)| v.exp()).collect();
    let mut ranked: Vec<([f64; 4], f64)> = results.iter().map(|(u, v)| (decode(u, bx), *v)).collect();
    ranked.sort_by(|x, y| {
        x.1.total_cmp(&y.1).then_with(|| {
            x.0.iter().zip(&y.0).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let (best, best_log) = ranked[0];
    if !best_log.is_finite() {
        return Err(BudgetError::NonFinite(best.to_vec()));
    }
    let [a, w0, delta_1, u_l] = best;
    let epg = ctx.objective(p, a, w0, delta_1, u_l);

    let lo = bx.lower();
    let hi = bx.upper();
    let mut gain: f64 = 0.0;
    for k in 0..4 {
        for factor in [0.98, 1.02] {
            let mut trial = best;
            trial[k] = (trial[k] * factor).clamp(lo[k], hi[k]);
            let v = ctx.objective(p, trial[0], trial[1], trial[2], trial[3]);
            gain = gain.max((epg - v) / epg);
        }
    }

    let names = ["a", "w0", "Delta1", "U_L"];
    let mut at_bounds = Vec::new();
    for k in 0..4 {
        if (best[k] / lo[k] - 1.0).abs() < 1e-6 {
            at_bounds.push((names[k].to_string(), "lower".to_string()));
        } else if (best[k] / hi[k] - 1.0).abs() < 1e-6 {
            at_bounds.push((names[k].to_string(), "upper".to_string()));
        }
    }

    let breakdown = ctx.evaluate(p, a, w0, delta_1, u_l);
    Ok(OptimumReport {
        a,
        w0,
        delta_1,
        u_l,
        omega_r: ctx.gate(p, w0, delta_1).omega_r.norm(),
        epg,
        breakdown,
        certified: gain <= 0.005,
        best_perturbation_gain: gain,
        start_values,
        at_bounds,
    })
}

/// EPG on the grid a_grid × w0_grid, indexed [i_a][i_w0].
pub fn epg_surface(
    a_grid: &[f64],
    w0_grid: &[f64],
    u_l: f64,
    delta_1: f64,
    p_r: f64,
    ctx: &RamanContext,
) -> Vec<Vec<f64>> {
    a_grid.par_iter().map(|&a| w0_grid.iter().map(|&w0| ctx.objective(p_r, a, w0, delta_1, u_l)).collect()).collect()
}

/// CSV with header `a_m,w0_m,epg`, a-major order.
pub fn surface_csv(a_grid: &[f64], w0_grid: &[f64], surface: &[Vec<f64>]) -> String {
    let mut out = String::from("a_m,w0_m,epg\n");
    for (i, a) in a_grid.iter().enumerate() {
        for (j, w) in w0_grid.iter().enumerate() {
            let _ = writeln!(out, "{a:e},{w:e},{:e}", surface[i][j]);
        }
    }
    out
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect(),
    }
}

/// Error of a Rydberg gate between atoms R sites apart falls as R^(−exponent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTalkModel {
    pub falloff_exponent: u32,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTalkDensity {
    /// Continuous separation at which the cross-talk error meets the threshold.
    pub radius: f64,
    pub min_separation_sites: u64,
    /// One gate per R-cube of sites, using the continuous R.
    pub atoms_per_gate: u64,
}

/// Separation needed so that `reference·R^(−exponent)` does not exceed the
/// threshold, where `reference` is the error one site away.
pub fn crosstalk_density(model: &CrossTalkModel, reference_epg_at_1_site: f64) -> CrossTalkDensity {
    let r = (reference_epg_at_1_site / model.threshold).powf(1.0 / f64::from(model.falloff_exponent)).max(1.0);
    let min_sep = ((r - 1e-9).ceil() as u64).max(1);
    CrossTalkDensity { radius: r, min_separation_sites: min_sep, atoms_per_gate: (r.powi(3).round() as u64).max(1) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Raman,
    Microwave,
}

/// How many qubits can be operated on in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model", content = "value")]
pub enum AddressabilityModel {
    Constant(f64),
    /// One row: sites_per_axis.
    PerRow,
    /// One plane: sites_per_axis^(d−1).
    PerPlane,
    /// Every qubit.
    All,
}

impl AddressabilityModel {
    pub fn n_a(&self, lattice: &LatticeConfig) -> f64 {
        let n = lattice.sites_per_axis as f64;
        match *self {
            AddressabilityModel::Constant(k) => k.min(lattice.site_count()),
            AddressabilityModel::PerRow => n,
            AddressabilityModel::PerPlane => n.powi(lattice.dimensions as i32 - 1),
            AddressabilityModel::All => lattice.site_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingScenario {
    pub lattice: LatticeConfig,
    pub gate_kind: GateKind,
    pub n_a_model: AddressabilityModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub gate_kind: GateKind,
    pub dimensions: u32,
    pub sites_per_axis: u64,
    pub qubits: f64,
    /// Laser power per beam set, W (calibrated to the power-model anchor).
    pub power_per_beam_set_w: f64,
    pub power_flagged: bool,
    pub kilowatt_scale: bool,
    pub n_a: f64,
    pub scatter_rate: f64,
    pub background_loss_rate: f64,
    pub gate_time: f64,
    pub storage_epg: f64,
    pub gate_epg: f64,
    pub total_epg: f64,
    pub steps_to_failure: f64,
    pub gates_per_qubit: f64,
}

/// Combine lattice scattering with the power and addressability models for one scenario.
#[allow(clippy::too_many_arguments)]
pub fn scaling_report(
    scenario: &ScalingScenario,
    model: &ResponseModel,
    state: &Sublevel,
    eps: Polarization,
    power: &PowerModel,
    gate_epg: f64,
    gate_time: f64,
    power_flag_w: f64,
) -> Result<ScalingReport, BudgetError> {
    let lat = &scenario.lattice;
    lat.validate()?;
    let qubits = lat.site_count();
    let n_a = scenario.n_a_model.n_a(lat);
    let rate = storage_scatter_rate(lat, model, state, eps)?;
    let ctx = StorageContext::new(qubits, n_a, gate_time)?;
    let storage = storage_epg(rate, &ctx);
    let p = power.power(model, lat, 1.0)?;
    let steps = 1.0 / (rate * gate_time);
    Ok(ScalingReport {
        gate_kind: scenario.gate_kind,
        dimensions: lat.dimensions,
        sites_per_axis: lat.sites_per_axis,
        qubits,
        power_per_beam_set_w: p,
        power_flagged: p > power_flag_w,
        kilowatt_scale: p >= 1000.0 * (1.0 - 1e-9),
        n_a,
        scatter_rate: rate,
        background_loss_rate: crate::lattice::DEFAULT_BACKGROUND_LOSS_RATE,
        gate_time,
        storage_epg: storage,
        gate_epg,
        total_epg: storage + gate_epg,
        steps_to_failure: steps,
        gates_per_qubit: steps * n_a / qubits,
    })
}
