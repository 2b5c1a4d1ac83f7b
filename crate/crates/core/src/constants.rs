//! CODATA 2018 physical constants (exact where the SI defines them).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Bohr radius, m.
pub const A0: f64 = 5.291_772_109_03e-11;
/// Fine-structure constant.
pub const ALPHA_FS: f64 = 7.297_352_569_3e-3;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_structure_constant_is_consistent_with_the_others() {
        let alpha = E_CHARGE * E_CHARGE / (4.0 * std::f64::consts::PI * EPSILON_0 * HBAR * C);
        assert!((alpha / ALPHA_FS - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bohr_radius_is_consistent() {
        let electron_mass = 9.109_383_701_5e-31;
        let a0 = 4.0 * std::f64::consts::PI * EPSILON_0 * HBAR * HBAR / (electron_mass * E_CHARGE * E_CHARGE);
        assert!((a0 / A0 - 1.0).abs() < 1e-8);
    }
}
