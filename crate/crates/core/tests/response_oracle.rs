//! Kramers–Heisenberg cross sections and polarizabilities checked against a
//! deliberately naive direct sum that shares no code with the library.

use alqc_core::atomic_data::{AtomSpec, Sublevel};
use alqc_core::response::{ground_state, Polarization, ResponseError, ResponseModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HBAR: f64 = 1.054_571_817e-34;
const C: f64 = 299_792_458.0;
const E: f64 = 1.602_176_634e-19;
const ALPHA_FS: f64 = 7.297_352_569_3e-3;

fn fact(n: i32) -> f64 {
    assert!(n >= 0, "negative factorial argument");
    (1..=n).map(f64::from).product()
}

// Doubled arguments throughout.
fn three_j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return 0.0;
    }
    let tri =
        fact((j1 + j2 - j3) / 2) * fact((j1 - j2 + j3) / 2) * fact((-j1 + j2 + j3) / 2) / fact((j1 + j2 + j3) / 2 + 1);
    let norm = tri
        * fact((j1 + m1) / 2)
        * fact((j1 - m1) / 2)
        * fact((j2 + m2) / 2)
        * fact((j2 - m2) / 2)
        * fact((j3 + m3) / 2)
        * fact((j3 - m3) / 2);
    let mut s = 0.0;
    for k in 0..50 {
        let d = [
            k,
            (j3 - j2 + m1) / 2 + k,
            (j3 - j1 - m2) / 2 + k,
            (j1 + j2 - j3) / 2 - k,
            (j1 - m1) / 2 - k,
            (j2 + m2) / 2 - k,
        ];
        if d.iter().all(|&x| x >= 0) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign / d.iter().map(|&x| fact(x)).product::<f64>();
        }
    }
    let sign = if ((j1 - j2 - m3) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * norm.sqrt() * s
}

fn six_j(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32) -> f64 {
    let tri = |x: i32, y: i32, z: i32| -> Option<f64> {
        if z < (x - y).abs() || z > x + y || (x + y + z) % 2 != 0 {
            return None;
        }
        Some(fact((x + y - z) / 2) * fact((x - y + z) / 2) * fact((-x + y + z) / 2) / fact((x + y + z) / 2 + 1))
    };
    let (Some(t1), Some(t2), Some(t3), Some(t4)) = (tri(a, b, c), tri(a, e, f), tri(d, b, f), tri(d, e, c)) else {
        return 0.0;
    };
    let mut s = 0.0;
    for t in 0..60 {
        let lower = [t - (a + b + c) / 2, t - (a + e + f) / 2, t - (d + b + f) / 2, t - (d + e + c) / 2];
        let upper = [(a + b + d + e) / 2 - t, (b + c + e + f) / 2 - t, (c + a + f + d) / 2 - t];
        if lower.iter().chain(upper.iter()).all(|&x| x >= 0) {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * fact(t + 1) / lower.iter().chain(upper.iter()).map(|&x| fact(x)).product::<f64>();
        }
    }
    (t1 * t2 * t3 * t4).sqrt() * s
}

#[derive(Clone, Copy)]
struct State {
    j2: i32,
    f2: i32,
    m2: i32,
    energy: f64,
}

struct Excited {
    s: State,
    reduced: f64,
}

struct Naive {
    i2: i32,
    ground: Vec<State>,
    excited: Vec<Excited>,
}

impl Naive {
    fn new(atom: &AtomSpec) -> Self {
        let manifold = |idx: usize| -> Vec<State> {
            let lvl = &atom.fine_levels[idx];
            let mut out = Vec::new();
            for hf in &lvl.hyperfine {
                let f2 = hf.f.twice_value;
                let mut m2 = -f2;
                while m2 <= f2 {
                    out.push(State { j2: lvl.j.twice_value, f2, m2, energy: lvl.energy + hf.shift });
                    m2 += 2;
                }
            }
            out
        };
        let ground = manifold(0);
        let mut excited = Vec::new();
        for line in &atom.lines {
            assert_eq!(line.lower, 0);
            for s in manifold(line.upper) {
                excited.push(Excited { s, reduced: line.reduced_element });
            }
        }
        Self { i2: atom.nuclear_spin.twice_value, ground, excited }
    }

    /// ⟨g| x·ε_q* |e⟩.
    fn dipole(&self, g: &State, e: &Excited, q: i32) -> f64 {
        let x = &e.s;
        if x.m2 != g.m2 + 2 * q {
            return 0.0;
        }
        let phase = if ((g.j2 + self.i2 + g.m2) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let mult = (f64::from(g.f2 + 1) * f64::from(x.f2 + 1) * f64::from(g.j2 + 1)).sqrt();
        e.reduced
            * phase
            * mult
            * three_j(g.f2, 2, x.f2, g.m2, 2 * q, -x.m2)
            * six_j(g.j2, x.j2, 2, x.f2, g.f2, self.i2)
    }

    fn find(&self, s: &Sublevel) -> State {
        *self.ground.iter().find(|g| g.f2 == s.f.twice_value && g.m2 == s.m_f.twice_value).unwrap()
    }

    fn sigma(&self, a: &State, b: &State, w: f64, q: i32) -> f64 {
        let w_out = w - (b.energy - a.energy);
        let mut sum_sq = 0.0;
        for qp in [-1, 0, 1] {
            let mut amp = 0.0;
            for i in &self.excited {
                let w_ia = i.s.energy - a.energy;
                let sign = if (q + qp).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                amp += self.dipole(a, i, q) * self.dipole(b, i, qp) / (w_ia - w);
                amp += sign * self.dipole(b, i, -q) * self.dipole(a, i, -qp) / (w_ia + w_out);
            }
            sum_sq += amp * amp;
        }
        8.0 * std::f64::consts::PI / 3.0 * ALPHA_FS * ALPHA_FS * w * w_out.powi(3) / (C * C) * sum_sq
    }

    fn alpha(&self, a: &State, w: f64, q: i32) -> f64 {
        let mut s = 0.0;
        for i in &self.excited {
            let w_ia = i.s.energy - a.energy;
            s += self.dipole(a, i, q).powi(2) / (w_ia - w) + self.dipole(a, i, -q).powi(2) / (w_ia + w);
        }
        E * E / HBAR * s
    }
}

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    if want == 0.0 {
        return got.abs() < 1e-60;
    }
    ((got - want) / want).abs() < tol
}

fn omega(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

#[test]
fn scattering_totals_match_naive_sum_on_random_samples() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let naive = Naive::new(&cs);
    let ground = model.ground_sublevels().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 100 {
        let a = ground[rng.gen_range(0..ground.len())];
        let eps = Polarization::new(rng.gen_range(-1..=1)).unwrap();
        let w = omega(rng.gen_range(700e-9..1100e-9));
        let raman = match model.raman_cross_section(&a, w, eps) {
            Ok(v) => v,
            Err(ResponseError::ResonanceProximity { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let rayleigh = model.rayleigh_cross_section(&a, w, eps).unwrap();
        let na = naive.find(&a);
        let want_raman: f64 = naive
            .ground
            .iter()
            .filter(|b| !(b.f2 == na.f2 && b.m2 == na.m2))
            .map(|b| naive.sigma(&na, b, w, eps.q()))
            .sum();
        let want_rayleigh = naive.sigma(&na, &na, w, eps.q());
        assert!(rel_close(raman, want_raman, 1e-10), "raman: {raman} vs {want_raman}");
        assert!(rel_close(rayleigh, want_rayleigh, 1e-10), "rayleigh: {rayleigh} vs {want_rayleigh}");

        // Single channels can cancel to ~1e-6 of their largest term, so they
        // are compared on the scale of the total rather than their own size.
        let scale = raman + rayleigh;
        for b in model.ground_sublevels() {
            let got = model.cross_section(&a, b, w, eps).unwrap();
            let want = naive.sigma(&na, &naive.find(b), w, eps.q());
            assert!((got - want).abs() <= 1e-10 * scale, "σ_ab: {got} vs {want}");
        }
        done += 1;
    }
}

#[test]
fn polarizability_matches_naive_sum_on_random_samples() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let naive = Naive::new(&cs);
    let ground = model.ground_sublevels().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    while done < 100 {
        let a = ground[rng.gen_range(0..ground.len())];
        let eps = Polarization::new(rng.gen_range(-1..=1)).unwrap();
        let w = omega(rng.gen_range(700e-9..1100e-9));
        let Ok(got) = model.polarizability(&a, w, eps) else { continue };
        let want = naive.alpha(&naive.find(&a), w, eps.q());
        assert!(rel_close(got, want, 1e-10), "α: {got} vs {want}");
        done += 1;
    }
}

#[test]
fn spectrum_matches_oracle_pointwise_across_780_to_1000_nm() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let naive = Naive::new(&cs);
    let a = ground_state(&cs, 3, 0);
    let na = naive.find(&a);
    let points = model.sweep(&a, Polarization::SIGMA_PLUS, 780e-9, 1000e-9, 221).unwrap();
    assert!(points.len() >= 200);
    for p in points {
        let raman: f64 = naive
            .ground
            .iter()
            .filter(|b| !(b.f2 == na.f2 && b.m2 == na.m2))
            .map(|b| naive.sigma(&na, b, p.omega, 1))
            .sum();
        assert!(rel_close(p.sigma_raman, raman, 1e-10));
        assert!(rel_close(p.sigma_rayleigh, naive.sigma(&na, &na, p.omega, 1), 1e-10));
        assert!(rel_close(p.alpha, naive.alpha(&na, p.omega, 1), 1e-10));
        assert!(p.sigma_raman >= 0.0 && p.sigma_rayleigh >= 0.0);
    }
}

#[test]
fn cross_section_scales_as_fourth_power_of_reduced_elements() {
    let cs = AtomSpec::cesium();
    let mut scaled = cs.clone();
    for line in &mut scaled.lines {
        line.reduced_element *= 1.7;
    }
    let a = ground_state(&cs, 3, 0);
    let b = ground_state(&cs, 4, 1);
    let w = omega(800e-9);
    let s1 = ResponseModel::new(&cs).cross_section(&a, &b, w, Polarization::SIGMA_PLUS).unwrap();
    let s2 = ResponseModel::new(&scaled).cross_section(&a, &b, w, Polarization::SIGMA_PLUS).unwrap();
    assert!(s1 > 0.0);
    assert!((s2 / s1 / 1.7f64.powi(4) - 1.0).abs() < 1e-12);
}

/// Groups of resonances whose exclusion windows overlap, as (low edge, high edge).
fn resonance_clusters(model: &ResponseModel, naive: &Naive, a: &Sublevel, q: i32) -> Vec<(f64, f64)> {
    let na = naive.find(a);
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for e in &naive.excited {
        if naive.dipole(&na, e, q) == 0.0 {
            continue;
        }
        let lifetime = model.atom().lines.iter().find(|l| l.reduced_element == e.reduced).unwrap().lifetime;
        let half = model.window_linewidths() / lifetime;
        let w = e.s.energy - na.energy;
        windows.push((w - half, w + half));
    }
    windows.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for w in windows {
        match merged.last_mut() {
            Some(last) if w.0 <= last.1 => last.1 = last.1.max(w.1),
            _ => merged.push(w),
        }
    }
    merged
}

#[test]
fn polarizability_changes_sign_across_each_resonance_group() {
    let cs = AtomSpec::cesium();
    // Windows far narrower than the hyperfine spacing, so that each line
    // dominates just outside its own window even when a neighbour is stronger.
    let model = ResponseModel::with_window(&cs, 0.01);
    let naive = Naive::new(&cs);
    for (f, m) in [(3, 0), (4, 0), (3, 1), (4, -2)] {
        let a = ground_state(&cs, f, m);
        for q in [-1, 0, 1] {
            let eps = Polarization::new(q).unwrap();
            let clusters = resonance_clusters(&model, &naive, &a, q);
            assert!(!clusters.is_empty());
            for (lo, hi) in clusters {
                let margin = 1e-3 * (hi - lo);
                let below = model.polarizability(&a, lo - margin, eps).unwrap();
                let above = model.polarizability(&a, hi + margin, eps).unwrap();
                assert!(below > 0.0 && above < 0.0, "F={f} m={m} q={q} [{lo:e},{hi:e}]: {below} / {above}");
                assert!(below.is_finite() && above.is_finite());
            }
        }
    }
}

#[test]
fn magic_wavelength_bracket_without_root_is_rejected() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let s_plus = ground_state(&cs, 3, 1);
    let s_minus = ground_state(&cs, 4, 1);
    let eps = Polarization::SIGMA_PLUS;
    // Dense scan of the sum confirms there is no root in [900, 950] nm.
    let sum = |l: f64| {
        model.polarizability(&s_plus, omega(l), eps).unwrap() + model.polarizability(&s_minus, omega(l), eps).unwrap()
    };
    let first = sum(900e-9).signum();
    for k in 0..=500 {
        assert_eq!(sum(900e-9 + 50e-9 * f64::from(k) / 500.0).signum(), first);
    }
    let err = model.find_magic_wavelength(&s_plus, &s_minus, eps, (900e-9, 950e-9)).unwrap_err();
    assert!(matches!(err, ResponseError::NoSignChange { .. }));

    let m1 = model.find_magic_wavelength(&s_plus, &s_minus, eps, (870e-9, 890e-9)).unwrap();
    let m2 = model.find_magic_wavelength(&s_minus, &s_plus, eps, (870e-9, 890e-9)).unwrap();
    assert!((m1 - 880e-9).abs() < 2e-9);
    assert!((m1 - m2).abs() < 1e-13);
}

#[test]
fn m_zero_states_are_nearly_unshifted_at_the_magic_wavelength() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let eps = Polarization::SIGMA_PLUS;
    let (p, m) = (ground_state(&cs, 3, 1), ground_state(&cs, 4, 1));
    let magic = model.find_magic_wavelength(&p, &m, eps, (870e-9, 890e-9)).unwrap();
    let w = omega(magic);
    let big = model.polarizability(&p, w, eps).unwrap().abs();
    let small3 = model.polarizability(&ground_state(&cs, 3, 0), w, eps).unwrap().abs();
    let small4 = model.polarizability(&ground_state(&cs, 4, 0), w, eps).unwrap().abs();
    assert!(big > 100.0 * small3, "{big} vs {small3}");
    assert!(big > 100.0 * small4, "{big} vs {small4}");
}

#[test]
fn bit_flip_share_is_reported() {
    let cs = AtomSpec::cesium();
    let model = ResponseModel::new(&cs);
    let a = ground_state(&cs, 3, 0);
    let partner = ground_state(&cs, 4, 0);
    let share = model.bit_flip_fraction(&a, &partner, omega(800e-9), Polarization::SIGMA_PLUS).unwrap();
    assert!((0.0..=1.0).contains(&share));
}

#[test]
fn results_ignore_the_sign_of_reduced_elements() {
    let cs = AtomSpec::cesium();
    let mut flipped = cs.clone();
    flipped.lines[0].reduced_element = -flipped.lines[0].reduced_element;
    let (a, b) = (ResponseModel::new(&cs), ResponseModel::new(&flipped));
    let s = ground_state(&cs, 3, 1);
    let eps = Polarization::new(1).unwrap();
    for lambda in [800e-9, 880e-9, 1000e-9] {
        let w = omega(lambda);
        assert_eq!(a.raman_cross_section(&s, w, eps).unwrap(), b.raman_cross_section(&s, w, eps).unwrap());
        assert!(rel_close(
            a.rayleigh_cross_section(&s, w, eps).unwrap(),
            b.rayleigh_cross_section(&s, w, eps).unwrap(),
            1e-15
        ));
        assert!(rel_close(a.polarizability(&s, w, eps).unwrap(), b.polarizability(&s, w, eps).unwrap(), 1e-15));
    }
}
