//! The analyses behind each subcommand. Every function is pure apart from
//! reading the atomic data file; it returns the files to write.

use crate::config::{ground, RunConfig};
use crate::table::{render, sci};
use crate::{CliError, Output};
use alqc_core::budget::{
    epg_surface, log_grid, minimize_raman_epg, scaling_report, surface_csv, GateKind, OptimumReport, ScalingReport,
    ScalingScenario,
};
use alqc_core::lattice::{storage_epg, storage_scatter_rate, PowerAnchor, PowerModel};
use alqc_core::microwave_gate::{position_heating_leg, total_microwave_epg, MicrowaveBudget, SimulatedRows};
use alqc_core::raman_gate::RamanBudget;
use alqc_core::response::ResponsePoint;
use alqc_core::units::microkelvin_to_joule;
use alqc_core::ResponseModel;
use alqc_propagator::gate::gate_grid;
use alqc_propagator::simulate::snapshot_csv;
use alqc_propagator::{build_microwave_gate, GateOptions, GateResult, PropagateOptions, SimulationOptions};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialise");
    s.push('\n');
    s
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagicReport {
    pub states: [[i32; 2]; 2],
    pub lambda_nm: Option<f64>,
    pub alpha: Option<[f64; 2]>,
    pub opposite_signs: Option<bool>,
    pub error: Option<String>,
}

pub fn magic(cfg: &RunConfig) -> Result<MagicReport, CliError> {
    let atom = cfg.atom()?;
    let s = &cfg.sweep;
    let model = ResponseModel::with_window(&atom, s.window_linewidths);
    let a = ground(&atom, s.magic_states[0][0], s.magic_states[0][1])?;
    let b = ground(&atom, s.magic_states[1][0], s.magic_states[1][1])?;
    let eps = s.polarization.get();
    let bracket = (s.magic_bracket_nm[0] / 1e9, s.magic_bracket_nm[1] / 1e9);
    Ok(match model.find_magic_wavelength(&a, &b, eps, bracket) {
        Ok(l) => {
            let w = alqc_core::units::wavelength_to_omega(l);
            let pa = model.polarizability(&a, w, eps).map_err(compute)?;
            let pb = model.polarizability(&b, w, eps).map_err(compute)?;
            MagicReport {
                states: s.magic_states,
                lambda_nm: Some(l * 1e9),
                alpha: Some([pa, pb]),
                opposite_signs: Some(pa.signum() != pb.signum()),
                error: None,
            }
        }
        Err(e) => MagicReport {
            states: s.magic_states,
            lambda_nm: None,
            alpha: None,
            opposite_signs: None,
            error: Some(e.to_string()),
        },
    })
}

pub fn sweep_points(cfg: &RunConfig) -> Result<Vec<ResponsePoint>, CliError> {
    let atom = cfg.atom()?;
    let s = &cfg.sweep;
    if !(s.lambda_min_nm > 0.0 && s.lambda_max_nm >= s.lambda_min_nm) {
        return Err(CliError::Config("sweep: need 0 < lambda_min_nm <= lambda_max_nm".into()));
    }
    if !(s.window_linewidths >= 0.0) {
        return Err(CliError::Config("sweep.window_linewidths must be non-negative".into()));
    }
    let model = ResponseModel::with_window(&atom, s.window_linewidths);
    let state = ground(&atom, s.state_f, s.state_mf)?;
    model.sweep(&state, s.polarization.get(), s.lambda_min_nm / 1e9, s.lambda_max_nm / 1e9, s.points).map_err(compute)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let points = sweep_points(cfg)?;
    let magic = magic(cfg)?;
    let mut csv = String::from("lambda_nm,omega_rad_s,sigma_raman_m2,sigma_rayleigh_m2,alpha_SI\n");
    for p in &points {
        let _ = writeln!(
            csv,
            "{:.6},{:e},{:e},{:e},{:e}",
            p.lambda * 1e9,
            p.omega,
            p.sigma_raman,
            p.sigma_rayleigh,
            p.alpha
        );
    }
    let skipped = cfg.sweep.points - points.len();
    let mut summary = format!("{} wavelengths written, {} inside resonance windows skipped\n", points.len(), skipped);
    match (magic.lambda_nm, magic.alpha) {
        (Some(l), Some(a)) => {
            let _ = writeln!(summary, "magic wavelength {l:.4} nm, alpha = {:.4e} / {:.4e} C^2 m^2 J^-1", a[0], a[1]);
        }
        _ => {
            let _ = writeln!(summary, "magic wavelength not found: {}", magic.error.clone().unwrap_or_default());
        }
    }
    Ok(Output { files: vec![("sweep.csv".into(), csv), ("magic.json".into(), json(&magic))], summary })
}

// ---------------------------------------------------------------- budget

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamanBudgetReport {
    pub p_r_w: f64,
    pub a_m: f64,
    pub w0_m: f64,
    pub delta_1_rad_s: f64,
    pub u_l_j: f64,
    pub omega_r_rad_s: f64,
    pub budget: RamanBudget,
}

pub fn raman_budget(cfg: &RunConfig) -> Result<RamanBudgetReport, CliError> {
    let atom = cfg.atom()?;
    let r = &cfg.raman;
    r.check()?;
    let ctx = r.context(&atom)?;
    let (p, a, w0, d1, u) =
        (r.p_mw / 1e3, r.a_um / 1e6, r.w0_um / 1e6, 2.0 * PI * r.delta1_thz * 1e12, microkelvin_to_joule(r.u_l_uk));
    let budget = ctx.evaluate(p, a, w0, d1, u);
    if !budget.total.is_finite() {
        return Err(CliError::Compute("Raman budget is not finite".into()));
    }
    Ok(RamanBudgetReport {
        p_r_w: p,
        a_m: a,
        w0_m: w0,
        delta_1_rad_s: d1,
        u_l_j: u,
        omega_r_rad_s: ctx.gate(p, w0, d1).omega_r.norm(),
        budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageReport {
    pub scatter_rate_per_s: f64,
    pub epg: f64,
    pub n_total: f64,
    pub n_addressable: f64,
    pub gate_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicrowaveBudgetReport {
    pub budget: MicrowaveBudget,
    pub position_heating_single_leg: f64,
    pub storage: StorageReport,
}

pub fn storage(cfg: &RunConfig) -> Result<StorageReport, CliError> {
    let atom = cfg.atom()?;
    let lattice = cfg.lattice.build(&atom)?;
    let ctx = cfg.storage.context()?;
    let model = ResponseModel::new(&atom);
    let state = ground(&atom, cfg.storage.state_f, cfg.storage.state_mf)?;
    let rate = storage_scatter_rate(&lattice, &model, &state, cfg.storage.polarization.get()).map_err(compute)?;
    Ok(StorageReport {
        scatter_rate_per_s: rate,
        epg: storage_epg(rate, &ctx),
        n_total: ctx.n_total,
        n_addressable: ctx.n_addressable,
        gate_time_s: ctx.gate_time,
    })
}

pub fn microwave_budget(cfg: &RunConfig, simulated: SimulatedRows) -> Result<MicrowaveBudgetReport, CliError> {
    let atom = cfg.atom()?;
    let lattice = cfg.lattice.build(&atom)?;
    let gate = cfg.microwave.build()?;
    let ctx = cfg.storage.context()?;
    let budget = total_microwave_epg(&gate, &lattice, &ctx, simulated);
    Ok(MicrowaveBudgetReport {
        budget,
        position_heating_single_leg: position_heating_leg(&gate, &lattice, gate.delta_x),
        storage: storage(cfg)?,
    })
}

/// Gate errors from the propagator at zero and at the configured pointing error.
pub fn simulated_rows(cfg: &RunConfig) -> Result<SimulatedRows, CliError> {
    let centred = simulate(cfg, Some(0.0))?.result.error;
    let offset = simulate(cfg, Some(cfg.microwave.delta_x_um))?.result.error;
    Ok(SimulatedRows { heating: Some(centred), position_heating: Some(offset) })
}

pub fn cmd_budget(cfg: &RunConfig, kind: GateKind, run_simulation: bool) -> Result<Output, CliError> {
    match kind {
        GateKind::Raman => {
            let rep = raman_budget(cfg)?;
            let rows: Vec<Vec<String>> =
                rep.budget.breakdown.iter().map(|m| vec![m.name.clone(), m.symbol.clone(), sci(m.value)]).collect();
            let mut text = render(&["Source", "Symbol", "EPG"], &rows);
            let _ = writeln!(text, "\nTotal EPG: {}", sci(rep.budget.total));
            let _ = writeln!(text, "Two-photon Rabi frequency: {} rad/s", sci(rep.omega_r_rad_s));
            for w in &rep.budget.warnings {
                let _ = writeln!(text, "warning: {w}");
            }
            Ok(Output {
                summary: text.clone(),
                files: vec![("budget_raman.txt".into(), text), ("budget_raman.json".into(), json(&rep))],
            })
        }
        GateKind::Microwave => {
            let mut sim = SimulatedRows {
                heating: cfg.microwave.simulated_heating,
                position_heating: cfg.microwave.simulated_position_heating,
            };
            if run_simulation {
                sim = simulated_rows(cfg)?;
            }
            let rep = microwave_budget(cfg, sim)?;
            let rows: Vec<Vec<String>> = rep
                .budget
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.symbol.clone(),
                        sci(r.formula),
                        r.simulation.map(sci).unwrap_or_else(|| "-".into()),
                    ]
                })
                .collect();
            let mut text = render(&["Source", "Symbol", "Formula value", "Simulation value"], &rows);
            let _ = writeln!(text, "\nTotal (formula): {}", sci(rep.budget.total));
            let _ = writeln!(text, "Total (simulation where available): {}", sci(rep.budget.total_with_simulation));
            let _ = writeln!(text, "P_mph single leg: {}", sci(rep.position_heating_single_leg));
            let _ = writeln!(
                text,
                "Lattice-light storage: rate {} s^-1, EPG {} (N = {}, n_A = {}, T1 = {} s)",
                sci(rep.storage.scatter_rate_per_s),
                sci(rep.storage.epg),
                rep.storage.n_total,
                rep.storage.n_addressable,
                rep.storage.gate_time_s
            );
            Ok(Output {
                summary: text.clone(),
                files: vec![("budget_microwave.txt".into(), text), ("budget_microwave.json".into(), json(&rep))],
            })
        }
    }
}

// ---------------------------------------------------------------- optimize / surface

pub fn optimize(cfg: &RunConfig) -> Result<OptimumReport, CliError> {
    let atom = cfg.atom()?;
    let bx = cfg.optimize.build()?;
    let ctx = cfg.raman.context(&atom)?;
    minimize_raman_epg(&bx, &ctx, &cfg.optimize.settings(cfg.seed)).map_err(compute)
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Output, CliError> {
    let r = optimize(cfg)?;
    let bound = |name: &str| {
        r.at_bounds.iter().find(|(n, _)| n == name).map(|(_, side)| side.clone()).unwrap_or_else(|| "interior".into())
    };
    let rows = vec![
        vec!["a".into(), format!("{:.4} um", r.a * 1e6), bound("a")],
        vec!["w0".into(), format!("{:.4} um", r.w0 * 1e6), bound("w0")],
        vec!["Delta1/2pi".into(), format!("{:.4} THz", r.delta_1 / (2.0 * PI) / 1e12), bound("Delta1")],
        vec!["U_L".into(), format!("{:.2} uK", alqc_core::units::joule_to_microkelvin(r.u_l)), bound("U_L")],
        vec!["Omega_R".into(), format!("{} rad/s", sci(r.omega_r)), "derived".into()],
    ];
    let mut text = render(&["Parameter", "Value", "Bound"], &rows);
    let _ = writeln!(text, "\nMinimum EPG: {}", sci(r.epg));
    let _ = writeln!(
        text,
        "Certified local minimum: {} (best +/-2% gain {:.2e})",
        if r.certified { "yes" } else { "no" },
        r.best_perturbation_gain
    );
    let _ = writeln!(text);
    let brows: Vec<Vec<String>> =
        r.breakdown.breakdown.iter().map(|m| vec![m.name.clone(), m.symbol.clone(), sci(m.value)]).collect();
    text.push_str(&render(&["Source", "Symbol", "EPG"], &brows));
    Ok(Output { summary: text.clone(), files: vec![("optimum.txt".into(), text), ("optimum.json".into(), json(&r))] })
}

pub struct Surface {
    pub a_grid: Vec<f64>,
    pub w0_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn surface(cfg: &RunConfig) -> Result<Surface, CliError> {
    let atom = cfg.atom()?;
    let s = &cfg.surface;
    s.check()?;
    let ctx = cfg.raman.context(&atom)?;
    let a_grid = log_grid(s.a_min_um / 1e6, s.a_max_um / 1e6, s.a_points);
    let w0_grid = log_grid(s.w0_min_um / 1e6, s.w0_max_um / 1e6, s.w0_points);
    let values = epg_surface(
        &a_grid,
        &w0_grid,
        microkelvin_to_joule(s.u_l_uk),
        2.0 * PI * s.delta1_thz * 1e12,
        s.p_mw / 1e3,
        &ctx,
    );
    Ok(Surface { a_grid, w0_grid, values })
}

pub fn cmd_surface(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = surface(cfg)?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (i, a) in s.a_grid.iter().enumerate() {
        for (j, w) in s.w0_grid.iter().enumerate() {
            if s.values[i][j] < best.0 {
                best = (s.values[i][j], *a, *w);
            }
        }
    }
    let summary = format!(
        "{} x {} surface written; grid minimum {} at a = {:.3} um, w0 = {:.3} um\n",
        s.a_grid.len(),
        s.w0_grid.len(),
        sci(best.0),
        best.1 * 1e6,
        best.2 * 1e6
    );
    Ok(Output { files: vec![("surface.csv".into(), surface_csv(&s.a_grid, &s.w0_grid, &s.values))], summary })
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub grid_points: usize,
    pub dimensions: usize,
    pub grid_length_m: f64,
    pub delta_x_m: f64,
    pub gate_time_s: f64,
    pub detunings_rad_s: [f64; 3],
    pub snapshot_times_s: Vec<f64>,
    pub result: GateResult,
}

/// Run the gate; `delta_x_um` overrides the configured pointing error.
pub fn simulate(cfg: &RunConfig, delta_x_um: Option<f64>) -> Result<SimulationReport, CliError> {
    let atom = cfg.atom()?;
    let lattice = cfg.lattice.build(&atom)?;
    let gate_cfg = cfg.microwave.build()?;
    let s = &cfg.simulate;
    let grid =
        gate_grid(&lattice, s.grid_points, s.dimensions).map_err(|e| CliError::Config(format!("simulate: {e}")))?;
    if !(s.tolerance > 0.0 && s.tolerance < 1e-3) {
        return Err(CliError::Config("simulate.tolerance must lie in (0, 1e-3)".into()));
    }
    let dx = delta_x_um.or(s.delta_x_um).unwrap_or(cfg.microwave.delta_x_um) / 1e6;
    let opts = GateOptions { calibration: s.calibration, variant: s.variant, projector_states: s.projector_states };
    let gate = build_microwave_gate(&lattice, &gate_cfg, &grid, dx, &opts).map_err(|e| match e {
        alqc_propagator::PropagatorError::InvalidGrid(_) | alqc_propagator::PropagatorError::InvalidHamiltonian(_) => {
            CliError::Config(format!("simulate: {e}"))
        }
        other => compute(other),
    })?;
    let total = gate.schedule.total_duration();
    let times: Vec<f64> = s.snapshot_times_us.iter().map(|t| t / 1e6).collect();
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= total * (1.0 + 1e-12))) {
        return Err(CliError::Config(format!("snapshot time {} us lies outside the gate", t * 1e6)));
    }
    let times: Vec<f64> = times.into_iter().map(|t| t.min(total)).collect();
    let sim = SimulationOptions {
        propagate: PropagateOptions { tolerance: s.tolerance, ..Default::default() },
        snapshot_times: times.clone(),
    };
    let result = gate.simulate(&sim).map_err(compute)?;
    Ok(SimulationReport {
        grid_points: grid.n_points,
        dimensions: grid.dimensions,
        grid_length_m: grid.length,
        delta_x_m: dx,
        gate_time_s: total,
        detunings_rad_s: gate.detunings,
        snapshot_times_s: times,
        result,
    })
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let rep = simulate(cfg, None)?;
    let grid =
        alqc_propagator::SpatialGrid::new(rep.grid_points, rep.grid_length_m, rep.dimensions).map_err(compute)?;
    let mut files = vec![("gate_result.json".into(), json(&rep))];
    for (k, snap) in rep.result.snapshots.iter().enumerate() {
        files.push((format!("snapshot_{k:03}.csv"), snapshot_csv(&grid, snap)));
    }
    let r = &rep.result;
    let summary = format!(
        "gate error {} (delta_x = {} um), motional excitation {}, norm deviation {:.1e}, {} snapshot(s)\n",
        sci(r.error),
        rep.delta_x_m * 1e6,
        sci(r.motional_excitation),
        r.norm_deviation,
        r.snapshots.len()
    );
    Ok(Output { files, summary })
}

// ---------------------------------------------------------------- scaling

pub fn scaling(cfg: &RunConfig) -> Result<ScalingReport, CliError> {
    let atom = cfg.atom()?;
    let s = &cfg.scaling;
    let lattice = s.lattice(&atom)?;
    if !(s.gate_time_ns > 0.0 && s.gate_epg >= 0.0 && s.power_flag_w > 0.0) {
        return Err(CliError::Config("scaling: gate_time_ns and power_flag_W must be positive, gate_epg >= 0".into()));
    }
    let model = ResponseModel::new(&atom);
    let state = ground(&atom, cfg.storage.state_f, cfg.storage.state_mf)?;
    let eps = cfg.storage.polarization.get();
    let power = PowerModel::calibrated(&model, &state, eps, PowerAnchor::default()).map_err(compute)?;
    let scenario = ScalingScenario { lattice, gate_kind: s.gate, n_a_model: s.model()? };
    scaling_report(&scenario, &model, &state, eps, &power, s.gate_epg, s.gate_time_ns / 1e9, s.power_flag_w)
        .map_err(compute)
}

pub fn cmd_scaling(cfg: &RunConfig) -> Result<Output, CliError> {
    let r = scaling(cfg)?;
    let rows = vec![
        vec!["Gate".into(), format!("{:?}", r.gate_kind).to_lowercase()],
        vec!["Lattice".into(), format!("{}^{} sites", r.sites_per_axis, r.dimensions)],
        vec!["Qubits".into(), sci(r.qubits)],
        vec![
            "Power per beam set".into(),
            format!("{:.3} W{}", r.power_per_beam_set_w, if r.power_flagged { " (flagged)" } else { "" }),
        ],
        vec!["Kilowatt scale".into(), if r.kilowatt_scale { "yes" } else { "no" }.into()],
        vec!["Addressable at once (n_A)".into(), sci(r.n_a)],
        vec!["Lattice scatter rate".into(), format!("{} s^-1", sci(r.scatter_rate))],
        vec!["Background loss rate".into(), format!("{} s^-1", sci(r.background_loss_rate))],
        vec!["Gate time".into(), format!("{} s", sci(r.gate_time))],
        vec!["Storage EPG".into(), sci(r.storage_epg)],
        vec!["Gate EPG".into(), sci(r.gate_epg)],
        vec!["Total EPG".into(), sci(r.total_epg)],
        vec!["Steps to failure".into(), sci(r.steps_to_failure)],
        vec!["Gates per qubit".into(), sci(r.gates_per_qubit)],
    ];
    let text = render(&["Quantity", "Value"], &rows);
    Ok(Output { summary: text.clone(), files: vec![("scaling.txt".into(), text), ("scaling.json".into(), json(&r))] })
}
