//! Running a pulse schedule and summarising the outcome.

use crate::chebyshev::{propagate, PropagateOptions};
use crate::eigenstates::MotionalBasis;
use crate::gate::MicrowaveGate;
use crate::grid::SpatialGrid;
use crate::hamiltonian::PulseSchedule;
use crate::wavefunction::MultiLevelWavefunction;
use crate::PropagatorError;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub propagate: PropagateOptions,
    /// Times (s from the start) at which level densities are recorded.
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub densities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateResult {
    /// 1 − |⟨target|ψ(T)⟩|².
    pub error: f64,
    pub populations: Vec<f64>,
    /// Population in motional states 1..n of the projector, summed over levels.
    pub motional_excitation: f64,
    /// Population outside the projector altogether.
    pub beyond_projector: f64,
    /// |‖ψ(T)‖² − 1|.
    pub norm_deviation: f64,
    /// Largest probability found in a boundary cell at any checked time.
    pub edge_density: f64,
    pub chebyshev_orders: Vec<usize>,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
    #[serde(skip)]
    pub final_state: MultiLevelWavefunction,
}

fn edge_density(psi: &MultiLevelWavefunction) -> f64 {
    let g = psi.grid;
    let n = g.n_points;
    let cell = g.cell();
    let mut m: f64 = 0.0;
    for l in 0..psi.levels {
        let d = psi.level(l);
        for (idx, a) in d.iter().enumerate() {
            let (ix, iy) = (idx % n, idx / n);
            let on_edge = ix == 0 || ix == n - 1 || (g.dimensions == 2 && (iy == 0 || iy == n - 1));
            if on_edge {
                m = m.max(a.norm_sqr() * cell);
            }
        }
    }
    m
}

fn motional_analysis(psi: &MultiLevelWavefunction, basis: &MotionalBasis) -> (f64, f64) {
    let cell = psi.grid.cell();
    let pops = psi.populations();
    let mut excited = 0.0;
    let mut captured = 0.0;
    for l in 0..psi.levels {
        let amp = psi.level(l);
        for (n, phi) in basis.states.iter().enumerate() {
            let overlap: num_complex::Complex64 =
                phi.iter().zip(amp).map(|(p, a)| a * *p).sum::<num_complex::Complex64>() * cell;
            let p = overlap.norm_sqr();
            captured += p;
            if n > 0 {
                excited += p;
            }
        }
    }
    let total: f64 = pops.iter().sum();
    (excited, (total - captured).max(0.0))
}

/// Evolve `initial` through `schedule` and compare with `target`.
pub fn simulate_gate(
    schedule: &PulseSchedule,
    initial: &MultiLevelWavefunction,
    target: &MultiLevelWavefunction,
    motional: &MotionalBasis,
    options: &SimulationOptions,
) -> Result<GateResult, PropagatorError> {
    let n0 = initial.norm_sqr();
    if (n0 - 1.0).abs() > 1e-9 {
        return Err(PropagatorError::NotNormalized(n0));
    }
    let total = schedule.total_duration();
    let mut stops: Vec<f64> = options.snapshot_times.clone();
    if stops.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > total) {
        return Err(PropagatorError::InvalidTime(total));
    }
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut psi = initial.clone();
    let mut edge = edge_density(&psi);
    let mut orders = Vec::new();
    let mut snapshots = Vec::new();
    let mut next_snap = stops.iter().peekable();
    while let Some(&&t) = next_snap.peek() {
        if t == 0.0 {
            snapshots.push(Snapshot { time: 0.0, densities: psi.densities() });
            next_snap.next();
        } else {
            break;
        }
    }
    let mut t0 = 0.0;
    // Only the first step checks resolution; later states are already on-grid.
    let mut popts = options.propagate;
    for (duration, h) in &schedule.segments {
        let t_end = t0 + duration;
        let mut t = t0;
        loop {
            let target_t = match next_snap.peek() {
                Some(&&s) if s <= t_end => s,
                _ => t_end,
            };
            if target_t > t {
                let (next, stats) = propagate(&psi, h, target_t - t, &popts)?;
                popts.check_resolution = false;
                psi = next;
                orders.push(stats.order);
                t = target_t;
            }
            if let Some(&&s) = next_snap.peek() {
                if s <= t_end {
                    snapshots.push(Snapshot { time: s, densities: psi.densities() });
                    edge = edge.max(edge_density(&psi));
                    next_snap.next();
                    continue;
                }
            }
            break;
        }
        t0 = t_end;
    }
    edge = edge.max(edge_density(&psi));
    let (motional_excitation, beyond_projector) = motional_analysis(&psi, motional);
    Ok(GateResult {
        error: target.infidelity(&psi),
        populations: psi.populations(),
        motional_excitation,
        beyond_projector,
        norm_deviation: (psi.norm_sqr() - 1.0).abs(),
        edge_density: edge,
        chebyshev_orders: orders,
        snapshots,
        final_state: psi,
    })
}

impl MicrowaveGate {
    pub fn simulate(&self, options: &SimulationOptions) -> Result<GateResult, PropagatorError> {
        simulate_gate(&self.schedule, &self.initial, &self.target, &self.motional, options)
    }
}

/// CSV of one snapshot: header `x_m[,y_m],level0,...`.
pub fn snapshot_csv(grid: &SpatialGrid, snap: &Snapshot) -> String {
    let mut s = String::new();
    s.push_str("x_m");
    if grid.dimensions == 2 {
        s.push_str(",y_m");
    }
    for l in 0..snap.densities.len() {
        let _ = write!(s, ",level{l}");
    }
    s.push('\n');
    for idx in 0..grid.size() {
        let (x, y) = grid.coords(idx);
        let _ = write!(s, "{x:e}");
        if grid.dimensions == 2 {
            let _ = write!(s, ",{y:e}");
        }
        for d in &snap.densities {
            let _ = write!(s, ",{:e}", d[idx]);
        }
        s.push('\n');
    }
    s
}
