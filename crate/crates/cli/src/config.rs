//! Run configuration: one TOML file with unit-suffixed keys, optionally
//! overridden by `--set key=value` pairs.

use crate::CliError;
use alqc_core::budget::{AddressabilityModel, GateKind, OptimizationBox, OptimizerSettings, RamanContext};
use alqc_core::lattice::{DetuningSide, LatticeConfig, StorageContext};
use alqc_core::microwave_gate::MicrowaveGateConfig;
use alqc_core::raman_gate::MotionalState;
use alqc_core::units::microkelvin_to_joule;
use alqc_core::{AtomSpec, Polarization, Sublevel};
use alqc_propagator::{Calibration, GateVariant};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Atomic data JSON. The bundled Cs file is used when absent.
    pub atom_data: Option<PathBuf>,
    pub lattice: LatticeSection,
    pub storage: StorageSection,
    pub sweep: SweepSection,
    pub raman: RamanSection,
    pub optimize: OptimizeSection,
    pub surface: SurfaceSection,
    pub microwave: MicrowaveSection,
    pub simulate: SimulateSection,
    pub scaling: ScalingSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            atom_data: None,
            lattice: LatticeSection::default(),
            storage: StorageSection::default(),
            sweep: SweepSection::default(),
            raman: RamanSection::default(),
            optimize: OptimizeSection::default(),
            surface: SurfaceSection::default(),
            microwave: MicrowaveSection::default(),
            simulate: SimulateSection::default(),
            scaling: ScalingSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationName {
    SigmaPlus,
    Pi,
    SigmaMinus,
}

impl PolarizationName {
    pub fn get(self) -> Polarization {
        match self {
            Self::SigmaPlus => Polarization::SIGMA_PLUS,
            Self::Pi => Polarization::PI,
            Self::SigmaMinus => Polarization::SIGMA_MINUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideName {
    Blue,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub a_um: f64,
    #[serde(rename = "U_L_uK")]
    pub u_l_uk: f64,
    pub lambda_nm: f64,
    pub side: SideName,
    pub sites_per_axis: u64,
    pub dimensions: u32,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { a_um: 5.0, u_l_uk: 200.0, lambda_nm: 800.0, side: SideName::Blue, sites_per_axis: 100, dimensions: 3 }
    }
}

impl LatticeSection {
    pub fn build(&self, atom: &AtomSpec) -> Result<LatticeConfig, CliError> {
        let side = match self.side {
            SideName::Blue => DetuningSide::Blue,
            SideName::Red => DetuningSide::Red,
        };
        LatticeConfig::new(
            self.a_um / 1e6,
            self.u_l_uk,
            self.lambda_nm / 1e9,
            side,
            self.sites_per_axis,
            self.dimensions,
            atom.mass,
        )
        .map_err(|e| CliError::Config(format!("lattice: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageSection {
    #[serde(rename = "state_F")]
    pub state_f: i32,
    #[serde(rename = "state_mF")]
    pub state_mf: i32,
    pub polarization: PolarizationName,
    pub n_total: f64,
    pub n_addressable: f64,
    pub gate_time_us: f64,
}

impl Default for StorageSection {
    fn default() -> Self {
        Self {
            state_f: 3,
            state_mf: 0,
            polarization: PolarizationName::SigmaPlus,
            n_total: 1e6,
            n_addressable: 100.0,
            gate_time_us: 76.0,
        }
    }
}

impl StorageSection {
    pub fn context(&self) -> Result<StorageContext, CliError> {
        StorageContext::new(self.n_total, self.n_addressable, self.gate_time_us / 1e6)
            .map_err(|e| CliError::Config(format!("storage: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub points: usize,
    #[serde(rename = "state_F")]
    pub state_f: i32,
    #[serde(rename = "state_mF")]
    pub state_mf: i32,
    pub polarization: PolarizationName,
    /// Half-width of the excluded band around each resonance, in linewidths.
    pub window_linewidths: f64,
    /// Two ground states (F, m_F) whose polarizabilities should cancel.
    pub magic_states: [[i32; 2]; 2],
    pub magic_bracket_nm: [f64; 2],
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            lambda_min_nm: 780.0,
            lambda_max_nm: 1000.0,
            points: 221,
            state_f: 3,
            state_mf: 0,
            polarization: PolarizationName::SigmaPlus,
            window_linewidths: alqc_core::response::DEFAULT_WINDOW_LINEWIDTHS,
            magic_states: [[3, 1], [4, 1]],
            magic_bracket_nm: [870.0, 890.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RamanSection {
    #[serde(rename = "P_mW")]
    pub p_mw: f64,
    pub a_um: f64,
    pub w0_um: f64,
    /// Δ₁/2π in THz.
    #[serde(rename = "Delta1_THz")]
    pub delta1_thz: f64,
    #[serde(rename = "U_L_uK")]
    pub u_l_uk: f64,
    pub lambda_nm: f64,
    pub tau_ns: f64,
    pub eta: f64,
    pub n_x: u32,
    pub n_y: u32,
}

impl Default for RamanSection {
    fn default() -> Self {
        Self {
            p_mw: 10.0,
            a_um: 10.0,
            w0_um: 5.0,
            delta1_thz: 5.0,
            u_l_uk: 500.0,
            lambda_nm: 894.0,
            tau_ns: 34.9,
            eta: 0.5,
            n_x: 0,
            n_y: 0,
        }
    }
}

impl RamanSection {
    pub fn context(&self, atom: &AtomSpec) -> Result<RamanContext, CliError> {
        if !(self.lambda_nm > 0.0 && self.tau_ns > 0.0 && self.eta > 0.0 && self.eta <= 1.0) {
            return Err(CliError::Config("raman: lambda_nm, tau_ns must be positive and 0 < eta <= 1".into()));
        }
        Ok(RamanContext {
            lambda_r: self.lambda_nm / 1e9,
            tau: self.tau_ns / 1e9,
            eta: self.eta,
            mass: atom.mass,
            motional: MotionalState { n_x: self.n_x, n_y: self.n_y },
        })
    }

    pub fn check(&self) -> Result<(), CliError> {
        for (k, v) in [
            ("P_mW", self.p_mw),
            ("a_um", self.a_um),
            ("w0_um", self.w0_um),
            ("Delta1_THz", self.delta1_thz),
            ("U_L_uK", self.u_l_uk),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("raman.{k} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(rename = "P_max_mW")]
    pub p_max_mw: f64,
    pub a_min_um: f64,
    pub a_max_um: f64,
    pub w0_min_um: f64,
    pub w0_max_um: f64,
    #[serde(rename = "U_L_min_uK")]
    pub u_l_min_uk: f64,
    #[serde(rename = "U_L_max_uK")]
    pub u_l_max_uk: f64,
    #[serde(rename = "Delta1_min_GHz")]
    pub delta1_min_ghz: f64,
    #[serde(rename = "Delta1_max_THz")]
    pub delta1_max_thz: f64,
    pub starts: usize,
    pub max_evals: usize,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            p_max_mw: 10.0,
            a_min_um: 1.0,
            a_max_um: 10.0,
            w0_min_um: 0.5,
            w0_max_um: 50.0,
            u_l_min_uk: 10.0,
            u_l_max_uk: 500.0,
            delta1_min_ghz: 50.0,
            delta1_max_thz: 5.0,
            starts: 16,
            max_evals: 4000,
        }
    }
}

impl OptimizeSection {
    pub fn build(&self) -> Result<OptimizationBox, CliError> {
        let bx = OptimizationBox {
            p_max: self.p_max_mw / 1e3,
            a_max: self.a_max_um / 1e6,
            u_l_max: microkelvin_to_joule(self.u_l_max_uk),
            delta1_max: 2.0 * PI * self.delta1_max_thz * 1e12,
            w0_range: (self.w0_min_um / 1e6, self.w0_max_um / 1e6),
            a_min: self.a_min_um / 1e6,
            u_l_min: microkelvin_to_joule(self.u_l_min_uk),
            delta1_min: 2.0 * PI * self.delta1_min_ghz * 1e9,
        };
        bx.validate().map_err(|e| CliError::Config(format!("optimize: {e}")))?;
        if self.starts == 0 || self.max_evals == 0 {
            return Err(CliError::Config("optimize: starts and max_evals must be positive".into()));
        }
        Ok(bx)
    }

    pub fn settings(&self, seed: u64) -> OptimizerSettings {
        OptimizerSettings { starts: self.starts, seed, max_evals: self.max_evals }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceSection {
    pub a_min_um: f64,
    pub a_max_um: f64,
    pub a_points: usize,
    pub w0_min_um: f64,
    pub w0_max_um: f64,
    pub w0_points: usize,
    #[serde(rename = "U_L_uK")]
    pub u_l_uk: f64,
    #[serde(rename = "Delta1_THz")]
    pub delta1_thz: f64,
    #[serde(rename = "P_mW")]
    pub p_mw: f64,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self {
            a_min_um: 1.0,
            a_max_um: 10.0,
            a_points: 41,
            w0_min_um: 0.5,
            w0_max_um: 50.0,
            w0_points: 61,
            u_l_uk: 500.0,
            delta1_thz: 5.0,
            p_mw: 10.0,
        }
    }
}

impl SurfaceSection {
    pub fn check(&self) -> Result<(), CliError> {
        let ok = |lo: f64, hi: f64| lo > 0.0 && hi >= lo && hi.is_finite();
        if !ok(self.a_min_um, self.a_max_um) || !ok(self.w0_min_um, self.w0_max_um) {
            return Err(CliError::Config("surface: need 0 < min <= max for a and w0".into()));
        }
        if self.a_points == 0 || self.w0_points == 0 {
            return Err(CliError::Config("surface: grids need at least one point".into()));
        }
        if !(self.u_l_uk > 0.0 && self.delta1_thz > 0.0 && self.p_mw > 0.0) {
            return Err(CliError::Config("surface: U_L_uK, Delta1_THz and P_mW must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MicrowaveSection {
    /// Peak light shift of the auxiliary levels, s⁻¹ (no 2π).
    pub delta_ac_per_s: f64,
    pub w0_um: f64,
    pub lambda_m_nm: f64,
    pub t1_us: f64,
    pub omega1_per_s: f64,
    pub delta_t_ns: f64,
    pub delta_x_um: f64,
    /// Simulated gate errors to put in the simulation column of the table.
    pub simulated_heating: Option<f64>,
    pub simulated_position_heating: Option<f64>,
}

impl Default for MicrowaveSection {
    fn default() -> Self {
        Self {
            delta_ac_per_s: 2e5,
            w0_um: 1.2,
            lambda_m_nm: 880.0,
            t1_us: 76.0,
            omega1_per_s: 41341.0,
            delta_t_ns: 0.1,
            delta_x_um: 0.01,
            simulated_heating: None,
            simulated_position_heating: None,
        }
    }
}

impl MicrowaveSection {
    pub fn build(&self) -> Result<MicrowaveGateConfig, CliError> {
        for (k, v) in [
            ("w0_um", self.w0_um),
            ("lambda_m_nm", self.lambda_m_nm),
            ("t1_us", self.t1_us),
            ("omega1_per_s", self.omega1_per_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("microwave.{k} must be positive")));
            }
        }
        if !(self.delta_ac_per_s.is_finite() && self.delta_t_ns >= 0.0 && self.delta_x_um.is_finite()) {
            return Err(CliError::Config("microwave: delta_ac_per_s, delta_t_ns or delta_x_um invalid".into()));
        }
        Ok(MicrowaveGateConfig::recommended(
            self.delta_ac_per_s,
            self.w0_um / 1e6,
            self.lambda_m_nm / 1e9,
            self.t1_us / 1e6,
            self.omega1_per_s,
            self.delta_t_ns / 1e9,
            self.delta_x_um / 1e6,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub grid_points: usize,
    pub dimensions: usize,
    pub calibration: Calibration,
    pub variant: GateVariant,
    /// Pointing error for the simulation; falls back to microwave.delta_x_um.
    pub delta_x_um: Option<f64>,
    pub snapshot_times_us: Vec<f64>,
    pub projector_states: usize,
    pub tolerance: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            grid_points: 512,
            dimensions: 1,
            calibration: Calibration::MotionalGround,
            variant: GateVariant::Simultaneous,
            delta_x_um: None,
            snapshot_times_us: Vec::new(),
            projector_states: 8,
            tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddressabilityName {
    Constant,
    PerRow,
    PerPlane,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub gate: GateKind,
    pub a_um: f64,
    #[serde(rename = "U_L_uK")]
    pub u_l_uk: f64,
    pub lambda_nm: f64,
    pub side: SideName,
    pub sites_per_axis: u64,
    pub dimensions: u32,
    pub n_a_model: AddressabilityName,
    /// Only used by the constant model.
    pub n_a: f64,
    pub gate_epg: f64,
    pub gate_time_ns: f64,
    #[serde(rename = "power_flag_W")]
    pub power_flag_w: f64,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            gate: GateKind::Raman,
            a_um: 10.0,
            u_l_uk: 500.0,
            lambda_nm: 851.7,
            side: SideName::Blue,
            sites_per_axis: 100,
            dimensions: 3,
            n_a_model: AddressabilityName::PerPlane,
            n_a: 100.0,
            gate_epg: 1e-5,
            gate_time_ns: 0.5,
            power_flag_w: 100.0,
        }
    }
}

impl ScalingSection {
    pub fn lattice(&self, atom: &AtomSpec) -> Result<LatticeConfig, CliError> {
        LatticeSection {
            a_um: self.a_um,
            u_l_uk: self.u_l_uk,
            lambda_nm: self.lambda_nm,
            side: self.side,
            sites_per_axis: self.sites_per_axis,
            dimensions: self.dimensions,
        }
        .build(atom)
        .map_err(|e| CliError::Config(e.to_string().replace("lattice:", "scaling:")))
    }

    pub fn model(&self) -> Result<AddressabilityModel, CliError> {
        Ok(match self.n_a_model {
            AddressabilityName::Constant => {
                if !(self.n_a >= 1.0) {
                    return Err(CliError::Config("scaling.n_a must be at least 1".into()));
                }
                AddressabilityModel::Constant(self.n_a)
            }
            AddressabilityName::PerRow => AddressabilityModel::PerRow,
            AddressabilityName::PerPlane => AddressabilityModel::PerPlane,
            AddressabilityName::All => AddressabilityModel::All,
        })
    }
}

impl RunConfig {
    /// Read `path` (if any), apply overrides, deserialize.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        if let (Some(p), Some(data)) = (path, &cfg.atom_data) {
            // Relative data paths are taken relative to the config file.
            if data.is_relative() {
                let base = p.parent().unwrap_or_else(|| Path::new("."));
                return Ok(RunConfig { atom_data: Some(base.join(data)), ..cfg });
            }
        }
        Ok(cfg)
    }

    pub fn atom(&self) -> Result<AtomSpec, CliError> {
        match &self.atom_data {
            None => Ok(AtomSpec::cesium()),
            Some(p) => {
                if !p.exists() {
                    return Err(CliError::Config(format!("atom data file {} does not exist", p.display())));
                }
                AtomSpec::load(p).map_err(|e| CliError::Config(format!("atom data: {e}")))
            }
        }
    }
}

/// Ground sublevel by integer (F, m_F).
pub fn ground(atom: &AtomSpec, f: i32, m_f: i32) -> Result<Sublevel, CliError> {
    atom.ground_sublevel(2 * f, 2 * m_f).ok_or_else(|| CliError::Config(format!("no ground sublevel F={f}, m_F={m_f}")))
}

/// `a.b.c=value`: value parsed as a TOML literal, or taken as a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) =
        spec.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{spec}'")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("--set has an empty key in '{spec}'")));
    }
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| CliError::Config(format!("--set {key}: '{part}' is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
