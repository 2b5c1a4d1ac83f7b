//! Alkali level data: fine levels, hyperfine shifts, D-line dipole elements and
//! lifetimes, loaded from a units-tagged JSON file.
//!
//! The loader converts every quantity to SI on the way in (rad/s, m, s, kg) so the
//! rest of the crate never sees a lab unit. See `docs/atomic-data.md` for the
//! schema.

use crate::angular::HalfInteger;
use crate::constants::{A0, C, EPSILON_0, E_CHARGE, HBAR};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use thiserror::Error;

const BUNDLED_CS: &str = include_str!("../data/cs133.json");

#[derive(Debug, Error)]
pub enum AtomDataError {
    #[error("{origin}: cannot read file: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: malformed JSON: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: missing field `{field}`")]
    MissingField { origin: String, field: String },
    #[error("{origin}: unknown unit `{unit}` for `{field}`")]
    UnknownUnit { origin: String, field: String, unit: String },
    #[error("{origin}: unit `{unit}` is not valid for `{field}`")]
    InconsistentUnits { origin: String, field: String, unit: String },
    #[error("{origin}: unknown level `{label}` referenced by `{field}`")]
    UnknownLevel { origin: String, field: String, label: String },
    #[error("{origin}: invariant violated: {message}")]
    InvariantViolation { origin: String, message: String },
    #[error("{origin}: no transition lines")]
    NoLines { origin: String },
}

/// One hyperfine component of a fine level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfineShift {
    pub f: HalfInteger,
    /// Shift from the fine-level centroid, rad/s.
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FineLevel {
    pub label: String,
    pub l: u32,
    pub j: HalfInteger,
    /// Centroid energy above the ground fine level, rad/s.
    pub energy: f64,
    pub hyperfine: Vec<HyperfineShift>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionLine {
    pub label: Option<String>,
    /// Index into [`AtomSpec::fine_levels`].
    pub lower: usize,
    pub upper: usize,
    /// ⟨J||x||J'⟩ in metres.
    pub reduced_element: f64,
    /// Lifetime of the upper level, s.
    pub lifetime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub species: String,
    pub provenance: Option<String>,
    pub mass: f64,
    pub nuclear_spin: HalfInteger,
    pub fine_levels: Vec<FineLevel>,
    pub lines: Vec<TransitionLine>,
}

/// A single |F, m_F⟩ sublevel of a fine level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sublevel {
    /// Index of the parent fine level.
    pub level: usize,
    pub j: HalfInteger,
    pub f: HalfInteger,
    pub m_f: HalfInteger,
    /// Absolute energy above the ground fine-level centroid, rad/s.
    pub energy: f64,
}

/// ω_i − ω_a in rad/s.
pub fn transition_frequency(a: &Sublevel, i: &Sublevel) -> f64 {
    i.energy - a.energy
}

// Raw file schema. Every field is optional here so that a missing one can be
// reported by name instead of as a serde position.

#[derive(Debug, Serialize, Deserialize)]
struct RawQuantity {
    value: Option<f64>,
    unit: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawLevel {
    label: Option<String>,
    #[serde(rename = "L")]
    l: Option<u32>,
    #[serde(rename = "J_2x")]
    j_2x: Option<i32>,
    energy: Option<RawQuantity>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawShift {
    #[serde(rename = "F_2x")]
    f_2x: Option<i32>,
    shift: Option<RawQuantity>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawLine {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    lower: Option<String>,
    upper: Option<String>,
    reduced_element: Option<RawQuantity>,
    lifetime: Option<RawQuantity>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawAtom {
    species: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
    mass_kg: Option<f64>,
    nuclear_spin_2x: Option<i32>,
    levels: Option<Vec<RawLevel>>,
    hyperfine: Option<BTreeMap<String, Vec<RawShift>>>,
    lines: Option<Vec<RawLine>>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Dimension {
    Frequency,
    Length,
    Dipole,
    Time,
}

fn classify(unit: &str) -> Option<(Dimension, f64)> {
    let two_pi = 2.0 * PI;
    Some(match unit {
        "rad/s" => (Dimension::Frequency, 1.0),
        "Hz" => (Dimension::Frequency, two_pi),
        "kHz" => (Dimension::Frequency, two_pi * 1e3),
        "MHz" => (Dimension::Frequency, two_pi * 1e6),
        "GHz" => (Dimension::Frequency, two_pi * 1e9),
        "THz" => (Dimension::Frequency, two_pi * 1e12),
        "cm-1" | "cm^-1" => (Dimension::Frequency, two_pi * C * 100.0),
        "m" => (Dimension::Length, 1.0),
        "nm" => (Dimension::Length, 1e-9),
        "a0·e" | "a0*e" | "e·a0" | "e*a0" | "ea0" | "a0" => (Dimension::Dipole, A0),
        "C·m" | "C*m" => (Dimension::Dipole, 1.0 / E_CHARGE),
        "s" => (Dimension::Time, 1.0),
        "ms" => (Dimension::Time, 1e-3),
        "us" | "μs" => (Dimension::Time, 1e-6),
        "ns" => (Dimension::Time, 1e-9),
        "ps" => (Dimension::Time, 1e-12),
        _ => return None,
    })
}

struct Loader<'a> {
    origin: &'a str,
}

impl Loader<'_> {
    fn missing(&self, field: impl Into<String>) -> AtomDataError {
        AtomDataError::MissingField { origin: self.origin.to_string(), field: field.into() }
    }

    fn invariant(&self, message: impl Into<String>) -> AtomDataError {
        AtomDataError::InvariantViolation { origin: self.origin.to_string(), message: message.into() }
    }

    fn quantity(&self, q: &Option<RawQuantity>, field: &str) -> Result<(f64, Dimension, f64, String), AtomDataError> {
        let q = q.as_ref().ok_or_else(|| self.missing(field))?;
        let value = q.value.ok_or_else(|| self.missing(format!("{field}.value")))?;
        let unit = q.unit.clone().ok_or_else(|| self.missing(format!("{field}.unit")))?;
        let (dim, scale) = classify(&unit).ok_or_else(|| AtomDataError::UnknownUnit {
            origin: self.origin.to_string(),
            field: field.to_string(),
            unit: unit.clone(),
        })?;
        Ok((value, dim, scale, unit))
    }

    fn wrong_unit(&self, field: &str, unit: String) -> AtomDataError {
        AtomDataError::InconsistentUnits { origin: self.origin.to_string(), field: field.to_string(), unit }
    }

    /// Angular frequency; a vacuum wavelength is accepted when `allow_wavelength`.
    fn frequency(&self, q: &Option<RawQuantity>, field: &str, allow_wavelength: bool) -> Result<f64, AtomDataError> {
        let (value, dim, scale, unit) = self.quantity(q, field)?;
        match dim {
            Dimension::Frequency => Ok(value * scale),
            Dimension::Length if allow_wavelength && value > 0.0 => Ok(2.0 * PI * C / (value * scale)),
            _ => Err(self.wrong_unit(field, unit)),
        }
    }

    fn dipole_length(&self, q: &Option<RawQuantity>, field: &str) -> Result<f64, AtomDataError> {
        let (value, dim, scale, unit) = self.quantity(q, field)?;
        match dim {
            Dimension::Dipole | Dimension::Length => Ok(value * scale),
            _ => Err(self.wrong_unit(field, unit)),
        }
    }

    fn time(&self, q: &Option<RawQuantity>, field: &str) -> Result<f64, AtomDataError> {
        let (value, dim, scale, unit) = self.quantity(q, field)?;
        match dim {
            Dimension::Time => Ok(value * scale),
            _ => Err(self.wrong_unit(field, unit)),
        }
    }

    fn build(&self, raw: RawAtom) -> Result<AtomSpec, AtomDataError> {
        let species = raw.species.ok_or_else(|| self.missing("species"))?;
        let mass = raw.mass_kg.ok_or_else(|| self.missing("mass_kg"))?;
        if !(mass > 0.0) {
            return Err(self.invariant("mass_kg must be positive"));
        }
        let i_2x = raw.nuclear_spin_2x.ok_or_else(|| self.missing("nuclear_spin_2x"))?;
        if i_2x < 0 {
            return Err(self.invariant("nuclear_spin_2x must be non-negative"));
        }
        let nuclear_spin = HalfInteger::from_twice(i_2x);

        let raw_levels = raw.levels.ok_or_else(|| self.missing("levels"))?;
        if raw_levels.is_empty() {
            return Err(self.invariant("no fine levels"));
        }
        let mut hyperfine = raw.hyperfine.unwrap_or_default();
        let mut fine_levels = Vec::with_capacity(raw_levels.len());
        for (idx, rl) in raw_levels.iter().enumerate() {
            let field = |name: &str| format!("levels[{idx}].{name}");
            let label = rl.label.clone().ok_or_else(|| self.missing(field("label")))?;
            let l = rl.l.ok_or_else(|| self.missing(field("L")))?;
            let j_2x = rl.j_2x.ok_or_else(|| self.missing(field("J_2x")))?;
            let energy = self.frequency(&rl.energy, &field("energy"), true)?;
            let two_l = 2 * l as i32;
            if j_2x < 0 || j_2x < (two_l - 1).abs() || j_2x > two_l + 1 {
                return Err(self.invariant(format!("level {label}: J = {j_2x}/2 incompatible with L = {l}")));
            }
            if fine_levels.iter().any(|f: &FineLevel| f.label == label) {
                return Err(self.invariant(format!("duplicate level label {label}")));
            }
            let j = HalfInteger::from_twice(j_2x);

            let shifts = hyperfine.remove(&label).ok_or_else(|| self.missing(format!("hyperfine.{label}")))?;
            if shifts.is_empty() {
                return Err(self.invariant(format!("level {label}: empty hyperfine list")));
            }
            let mut hf = Vec::with_capacity(shifts.len());
            for (k, s) in shifts.iter().enumerate() {
                let sf = |name: &str| format!("hyperfine.{label}[{k}].{name}");
                let f_2x = s.f_2x.ok_or_else(|| self.missing(sf("F_2x")))?;
                let shift = self.frequency(&s.shift, &sf("shift"), false)?;
                let lo = (j_2x - i_2x).abs();
                let hi = j_2x + i_2x;
                if f_2x < lo || f_2x > hi || (f_2x - hi) % 2 != 0 {
                    return Err(self.invariant(format!(
                        "level {label}: F = {} violates |J - I| <= F <= J + I",
                        HalfInteger::from_twice(f_2x)
                    )));
                }
                if let Some(prev) = hf.last() {
                    let prev: &HyperfineShift = prev;
                    if prev.f.twice_value >= f_2x {
                        return Err(
                            self.invariant(format!("level {label}: hyperfine F values not strictly increasing"))
                        );
                    }
                }
                hf.push(HyperfineShift { f: HalfInteger::from_twice(f_2x), shift });
            }
            fine_levels.push(FineLevel { label, l, j, energy, hyperfine: hf });
        }
        if let Some(label) = hyperfine.keys().next() {
            return Err(AtomDataError::UnknownLevel {
                origin: self.origin.to_string(),
                field: "hyperfine".into(),
                label: label.clone(),
            });
        }
        let min_energy = fine_levels.iter().map(|l| l.energy).fold(f64::INFINITY, f64::min);
        if min_energy != 0.0 {
            return Err(self.invariant("ground level (energy 0) not present"));
        }

        let raw_lines = raw.lines.ok_or_else(|| self.missing("lines"))?;
        if raw_lines.is_empty() {
            return Err(AtomDataError::NoLines { origin: self.origin.to_string() });
        }
        let find = |label: &str, field: String| {
            fine_levels.iter().position(|l| l.label == label).ok_or_else(|| AtomDataError::UnknownLevel {
                origin: self.origin.to_string(),
                field,
                label: label.to_string(),
            })
        };
        let mut lines = Vec::with_capacity(raw_lines.len());
        for (idx, rl) in raw_lines.iter().enumerate() {
            let field = |name: &str| format!("lines[{idx}].{name}");
            let lower_label = rl.lower.as_deref().ok_or_else(|| self.missing(field("lower")))?;
            let upper_label = rl.upper.as_deref().ok_or_else(|| self.missing(field("upper")))?;
            let lower = find(lower_label, field("lower"))?;
            let upper = find(upper_label, field("upper"))?;
            let reduced_element = self.dipole_length(&rl.reduced_element, &field("reduced_element"))?;
            let lifetime = self.time(&rl.lifetime, &field("lifetime"))?;
            if !(reduced_element > 0.0) {
                return Err(self.invariant(format!("{}: reduced element must be positive", field("reduced_element"))));
            }
            if !(lifetime > 0.0) {
                return Err(self.invariant(format!("{}: lifetime must be positive", field("lifetime"))));
            }
            if fine_levels[upper].energy <= fine_levels[lower].energy {
                return Err(self.invariant(format!("line {idx}: upper level is not above lower level")));
            }
            lines.push(TransitionLine { label: rl.label.clone(), lower, upper, reduced_element, lifetime });
        }

        Ok(AtomSpec { species, provenance: raw.provenance, mass, nuclear_spin, fine_levels, lines })
    }
}

impl AtomSpec {
    /// Parse and validate a JSON document. `origin` names the source in error messages.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, AtomDataError> {
        let raw: RawAtom = serde_json::from_str(text)
            .map_err(|e| AtomDataError::Parse { origin: origin.to_string(), message: e.to_string() })?;
        Loader { origin }.build(raw)
    }

    /// Load a data file from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, AtomDataError> {
        let path = path.as_ref();
        let origin = path.display().to_string();
        let text =
            std::fs::read_to_string(path).map_err(|source| AtomDataError::Io { origin: origin.clone(), source })?;
        Self::from_json_str(&text, &origin)
    }

    /// The bundled ¹³³Cs data set.
    pub fn cesium() -> Self {
        Self::from_json_str(BUNDLED_CS, "cs133.json (bundled)").expect("bundled Cs data is valid")
    }

    /// Serialize back to the file schema with every quantity in SI units.
    pub fn to_json_string(&self) -> String {
        let q = |value: f64, unit: &str| Some(RawQuantity { value: Some(value), unit: Some(unit.to_string()) });
        let raw = RawAtom {
            species: Some(self.species.clone()),
            provenance: self.provenance.clone(),
            mass_kg: Some(self.mass),
            nuclear_spin_2x: Some(self.nuclear_spin.twice_value),
            levels: Some(
                self.fine_levels
                    .iter()
                    .map(|l| RawLevel {
                        label: Some(l.label.clone()),
                        l: Some(l.l),
                        j_2x: Some(l.j.twice_value),
                        energy: q(l.energy, "rad/s"),
                    })
                    .collect(),
            ),
            hyperfine: Some(
                self.fine_levels
                    .iter()
                    .map(|l| {
                        let shifts = l
                            .hyperfine
                            .iter()
                            .map(|h| RawShift { f_2x: Some(h.f.twice_value), shift: q(h.shift, "rad/s") })
                            .collect();
                        (l.label.clone(), shifts)
                    })
                    .collect(),
            ),
            lines: Some(
                self.lines
                    .iter()
                    .map(|line| RawLine {
                        label: line.label.clone(),
                        lower: Some(self.fine_levels[line.lower].label.clone()),
                        upper: Some(self.fine_levels[line.upper].label.clone()),
                        reduced_element: q(line.reduced_element, "m"),
                        lifetime: q(line.lifetime, "s"),
                    })
                    .collect(),
            ),
        };
        serde_json::to_string_pretty(&raw).expect("atom data serializes")
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.fine_levels.iter().position(|l| l.label == label)
    }

    /// Index of the ground fine level (the one at zero energy).
    pub fn ground_index(&self) -> usize {
        self.fine_levels.iter().position(|l| l.energy == 0.0).expect("validated at load")
    }

    /// Every |F, m_F⟩ sublevel of a fine level, ordered by F then m_F.
    pub fn sublevels(&self, level: usize) -> Vec<Sublevel> {
        let fl = &self.fine_levels[level];
        fl.hyperfine
            .iter()
            .flat_map(|h| {
                h.f.projections().map(move |m_f| Sublevel { level, j: fl.j, f: h.f, m_f, energy: fl.energy + h.shift })
            })
            .collect()
    }

    /// The sublevel |F, m_F⟩ of `level`, if it exists.
    pub fn sublevel(&self, level: usize, f: HalfInteger, m_f: HalfInteger) -> Option<Sublevel> {
        let fl = self.fine_levels.get(level)?;
        let h = fl.hyperfine.iter().find(|h| h.f == f)?;
        if m_f.twice_value.abs() > f.twice_value || (f.twice_value + m_f.twice_value) % 2 != 0 {
            return None;
        }
        Some(Sublevel { level, j: fl.j, f, m_f, energy: fl.energy + h.shift })
    }

    /// Ground-manifold sublevel with integer-or-half-integer F and m_F given as doubled values.
    pub fn ground_sublevel(&self, f_2x: i32, m_2x: i32) -> Option<Sublevel> {
        self.sublevel(self.ground_index(), HalfInteger::from_twice(f_2x), HalfInteger::from_twice(m_2x))
    }

    /// Lines whose lower level is the ground level.
    pub fn ground_lines(&self) -> impl Iterator<Item = &TransitionLine> {
        let g = self.ground_index();
        self.lines.iter().filter(move |l| l.lower == g)
    }

    pub fn line_by_label(&self, label: &str) -> Option<&TransitionLine> {
        self.lines.iter().find(|l| l.label.as_deref() == Some(label))
    }

    /// Centroid angular frequency of a line, rad/s.
    pub fn line_frequency(&self, line: &TransitionLine) -> f64 {
        self.fine_levels[line.upper].energy - self.fine_levels[line.lower].energy
    }

    /// Spontaneous decay rate implied by the reduced element:
    /// Γ = ω³ e² (2J+1) |⟨J||x||J'⟩|² / (3π ε₀ ħ c³ (2J'+1)).
    pub fn decay_rate_from_reduced_element(&self, line: &TransitionLine) -> f64 {
        let omega = self.line_frequency(line);
        let jl = f64::from(self.fine_levels[line.lower].j.multiplicity());
        let ju = f64::from(self.fine_levels[line.upper].j.multiplicity());
        let d = E_CHARGE * line.reduced_element;
        omega.powi(3) * d * d * jl / (3.0 * PI * EPSILON_0 * HBAR * C.powi(3) * ju)
    }

    /// Ratio of the ingested lifetime to the lifetime implied by the dipole element,
    /// per line. A value far from 1 points at a unit error in the data file.
    pub fn lifetime_consistency(&self) -> Vec<(String, f64)> {
        self.lines
            .iter()
            .enumerate()
            .map(|(k, line)| {
                let name = line.label.clone().unwrap_or_else(|| format!("line {k}"));
                (name, line.lifetime * self.decay_rate_from_reduced_element(line))
            })
            .collect()
    }
}
