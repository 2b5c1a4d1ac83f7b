//! Angular-momentum algebra: Wigner 3j and 6j symbols and hyperfine dipole
//! matrix elements from the Wigner-Eckart theorem.
//!
//! Half-integers are carried as doubled integers so that every selection rule is
//! an exact integer comparison. The Racah sums are evaluated in floating point:
//! the prefactor and the first term of each sum go through a log-factorial table,
//! and the remaining terms are generated by exact small-integer ratios so the
//! alternating sum never sees overflowing factorials.

use crate::atomic_data::Sublevel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// A non-negative or negative multiple of 1/2, stored as `twice_value = 2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    pub twice_value: i32,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice_value: 0 };
    pub const ONE: HalfInteger = HalfInteger { twice_value: 2 };

    /// Build from the doubled value, e.g. `from_twice(7)` is 7/2.
    pub const fn from_twice(twice_value: i32) -> Self {
        Self { twice_value }
    }

    pub const fn from_int(n: i32) -> Self {
        Self { twice_value: 2 * n }
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_value) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    /// `2j + 1`, the multiplicity of an angular momentum `j`.
    pub fn multiplicity(self) -> i32 {
        self.twice_value + 1
    }

    /// All projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInteger> {
        let tj = self.twice_value;
        (0..=2 * tj).step_by(2).map(move |k| HalfInteger::from_twice(k - tj))
    }
}

impl std::ops::Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger::from_twice(self.twice_value + rhs.twice_value)
    }
}

impl std::ops::Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger::from_twice(self.twice_value - rhs.twice_value)
    }
}

impl std::ops::Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger::from_twice(-self.twice_value)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngularError {
    #[error("invalid sublevel: F = {f}, m_F = {m}")]
    InvalidSublevel { f: HalfInteger, m: HalfInteger },
    #[error("spherical polarization index must be -1, 0 or +1, got {0}")]
    InvalidPolarization(i32),
}

const TABLE_LEN: usize = 1024;

fn ln_factorial(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    debug_assert!(n >= 0);
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        for k in 1..TABLE_LEN {
            t.push(t[k - 1] + (k as f64).ln());
        }
        t
    });
    if (n as usize) < TABLE_LEN {
        table[n as usize]
    } else {
        table[TABLE_LEN - 1] + (TABLE_LEN as i64..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

fn sign(exponent: i64) -> f64 {
    if exponent.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Triangle rule on doubled values, including the integer-perimeter condition.
fn triangle(ta: i32, tb: i32, tc: i32) -> bool {
    ta >= 0 && tb >= 0 && tc >= 0 && tc >= (ta - tb).abs() && tc <= ta + tb && (ta + tb + tc) % 2 == 0
}

/// ln Δ(abc) = ln[(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!] for a valid triad.
fn ln_delta(ta: i32, tb: i32, tc: i32) -> f64 {
    let f = |t: i32| ln_factorial(i64::from(t / 2));
    f(ta + tb - tc) + f(ta - tb + tc) + f(-ta + tb + tc) - ln_factorial(i64::from((ta + tb + tc) / 2 + 1))
}

fn projection_ok(j: HalfInteger, m: HalfInteger) -> bool {
    j.twice_value >= 0 && m.twice_value.abs() <= j.twice_value && (j.twice_value + m.twice_value) % 2 == 0
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`. Selection-rule failures give exactly 0.
pub fn wigner_3j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> f64 {
    let (tj1, tj2, tj3) = (j1.twice_value, j2.twice_value, j3.twice_value);
    let (tm1, tm2, tm3) = (m1.twice_value, m2.twice_value, m3.twice_value);
    if tm1 + tm2 + tm3 != 0
        || !projection_ok(j1, m1)
        || !projection_ok(j2, m2)
        || !projection_ok(j3, m3)
        || !triangle(tj1, tj2, tj3)
    {
        return 0.0;
    }
    if tm1 == 0 && tm2 == 0 && tm3 == 0 && ((tj1 + tj2 + tj3) / 2) % 2 == 1 {
        return 0.0;
    }

    // Racah's sum over k of (-1)^k / [k! (a-k)! (b-k)! (c-k)! (d+k)! (e+k)!]
    let a = i64::from((tj1 + tj2 - tj3) / 2);
    let b = i64::from((tj1 - tm1) / 2);
    let c = i64::from((tj2 + tm2) / 2);
    let d = i64::from((tj3 - tj2 + tm1) / 2);
    let e = i64::from((tj3 - tj1 - tm2) / 2);
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);
    if kmin > kmax {
        return 0.0;
    }

    let h = |t: i32| ln_factorial(i64::from(t / 2));
    let ln_pref = 0.5
        * (ln_delta(tj1, tj2, tj3)
            + h(tj1 + tm1)
            + h(tj1 - tm1)
            + h(tj2 + tm2)
            + h(tj2 - tm2)
            + h(tj3 + tm3)
            + h(tj3 - tm3));
    let k = kmin;
    let ln_t0 = -(ln_factorial(k)
        + ln_factorial(a - k)
        + ln_factorial(b - k)
        + ln_factorial(c - k)
        + ln_factorial(d + k)
        + ln_factorial(e + k));

    let mut term = 1.0;
    let mut sum = 1.0;
    for k in kmin..kmax {
        let num = ((a - k) * (b - k) * (c - k)) as f64;
        let den = ((k + 1) * (d + k + 1) * (e + k + 1)) as f64;
        term *= -num / den;
        sum += term;
    }
    let phase = sign(i64::from((tj1 - tj2 - tm3) / 2) + kmin);
    phase * (ln_pref + ln_t0).exp() * sum
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`. Any failing triad gives exactly 0.
pub fn wigner_6j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    j4: HalfInteger,
    j5: HalfInteger,
    j6: HalfInteger,
) -> f64 {
    let t = [j1, j2, j3, j4, j5, j6].map(|j| j.twice_value);
    let [tj1, tj2, tj3, tj4, tj5, tj6] = t;
    let triads = [(tj1, tj2, tj3), (tj1, tj5, tj6), (tj4, tj2, tj6), (tj4, tj5, tj3)];
    if !triads.iter().all(|&(x, y, z)| triangle(x, y, z)) {
        return 0.0;
    }
    let alphas = triads.map(|(x, y, z)| i64::from((x + y + z) / 2));
    let betas = [
        i64::from((tj1 + tj2 + tj4 + tj5) / 2),
        i64::from((tj2 + tj3 + tj5 + tj6) / 2),
        i64::from((tj3 + tj1 + tj6 + tj4) / 2),
    ];
    let kmin = *alphas.iter().max().unwrap();
    let kmax = *betas.iter().min().unwrap();
    if kmin > kmax {
        return 0.0;
    }

    let ln_pref = 0.5 * triads.iter().map(|&(x, y, z)| ln_delta(x, y, z)).sum::<f64>();
    let ln_t0 = ln_factorial(kmin + 1)
        - alphas.iter().map(|&al| ln_factorial(kmin - al)).sum::<f64>()
        - betas.iter().map(|&be| ln_factorial(be - kmin)).sum::<f64>();

    let mut term = 1.0;
    let mut sum = 1.0;
    for k in kmin..kmax {
        let num = ((k + 2) * (betas[0] - k) * (betas[1] - k) * (betas[2] - k)) as f64;
        let den = alphas.iter().map(|&al| (k + 1 - al) as f64).product::<f64>();
        term *= -num / den;
        sum += term;
    }
    sign(kmin) * (ln_pref + ln_t0).exp() * sum
}

fn check_sublevel(s: &Sublevel) -> Result<(), AngularError> {
    if projection_ok(s.f, s.m_f) {
        Ok(())
    } else {
        Err(AngularError::InvalidSublevel { f: s.f, m: s.m_f })
    }
}

/// ⟨F m_F| x·ε_q* |F' m_F'⟩ for a bra in the fine level with angular momentum
/// `ground.j` and a ket in the level with `excited.j`.
///
/// `reduced_element` is ⟨J||x||J'⟩ in metres. The phase and normalisation are
/// (-1)^(J+I+m_F) √((2F+1)(2F'+1)(2J+1)) times a 3j and a 6j symbol. Nothing
/// forces the bra to be the lower level; swapping the arguments evaluates the
/// same expression with the roles exchanged, which is generally a different
/// number.
pub fn hyperfine_dipole_element(
    ground: &Sublevel,
    excited: &Sublevel,
    q: i32,
    reduced_element: f64,
    nuclear_spin: HalfInteger,
) -> Result<f64, AngularError> {
    if !(-1..=1).contains(&q) {
        return Err(AngularError::InvalidPolarization(q));
    }
    check_sublevel(ground)?;
    check_sublevel(excited)?;
    let q_h = HalfInteger::from_int(q);
    if excited.m_f != ground.m_f + q_h {
        return Ok(0.0);
    }
    let phase =
        sign(i64::from((ground.j.twice_value + nuclear_spin.twice_value + ground.m_f.twice_value).div_euclid(2)));
    let norm = f64::from(ground.f.multiplicity() * excited.f.multiplicity() * ground.j.multiplicity()).sqrt();
    let three_j = wigner_3j(ground.f, HalfInteger::ONE, excited.f, ground.m_f, q_h, -excited.m_f);
    let six_j = wigner_6j(ground.j, excited.j, HalfInteger::ONE, excited.f, ground.f, nuclear_spin);
    Ok(reduced_element * phase * norm * three_j * six_j)
}
