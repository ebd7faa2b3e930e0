//! Laboratory to dimensionless unit conversion.
//!
//! Lengths are measured in units of `g/ω²`, times in `1/ω` and energies in
//! `M g²/ω²`, where `ω` is the angular drive frequency. In these units the
//! drive reads `λ x sin t` and the reduced Planck constant becomes
//! `k̄ = ħ ω³ / (M g²)`.

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Default gravitational acceleration in m/s².
pub const STANDARD_GRAVITY: f64 = 9.8;

/// Mass of the cesium atoms used in the bouncer example, in kg.
pub const CESIUM_MASS: f64 = 2.2e-25;

/// Conversion factors between laboratory and dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledUnits {
    /// Meters per dimensionless length unit.
    pub length_scale: f64,
    /// Seconds per dimensionless time unit.
    pub time_scale: f64,
    /// Joules per dimensionless energy unit.
    pub energy_scale: f64,
    /// Dimensionless effective Planck constant.
    pub kbar: f64,
}

/// Builds the unit system for an atom of `mass` (kg) falling with
/// acceleration `gravity` (m/s²) and driven at `drive_frequency` (rad/s),
/// using the CODATA value of ħ.
pub fn derive_units(mass: f64, gravity: f64, drive_frequency: f64) -> Result<ScaledUnits> {
    derive_units_with_hbar(mass, gravity, drive_frequency, HBAR)
}

/// Same as [`derive_units`] with an explicit ħ.
pub fn derive_units_with_hbar(
    mass: f64,
    gravity: f64,
    drive_frequency: f64,
    hbar: f64,
) -> Result<ScaledUnits> {
    for (name, value) in [
        ("mass", mass),
        ("gravity", gravity),
        ("drive frequency", drive_frequency),
        ("hbar", hbar),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {value}")));
        }
    }
    let omega2 = drive_frequency * drive_frequency;
    let energy_scale = mass * gravity * gravity / omega2;
    let time_scale = 1.0 / drive_frequency;
    Ok(ScaledUnits {
        length_scale: gravity / omega2,
        time_scale,
        energy_scale,
        // ħ / (energy · time) == ħ ω³ / (M g²)
        kbar: hbar / (energy_scale * time_scale),
    })
}

impl ScaledUnits {
    pub fn to_dimensionless_position(&self, z_lab: f64) -> f64 {
        z_lab / self.length_scale
    }

    pub fn to_lab_position(&self, z: f64) -> f64 {
        z * self.length_scale
    }

    pub fn to_dimensionless_time(&self, t_lab: f64) -> f64 {
        t_lab / self.time_scale
    }

    pub fn to_lab_time(&self, t: f64) -> f64 {
        t * self.time_scale
    }

    pub fn to_dimensionless_energy(&self, e_lab: f64) -> f64 {
        e_lab / self.energy_scale
    }
}

/// Free-function form of [`ScaledUnits::to_dimensionless_position`].
pub fn to_dimensionless_position(z_lab: f64, units: &ScaledUnits) -> f64 {
    units.to_dimensionless_position(z_lab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cesium() -> ScaledUnits {
        derive_units(CESIUM_MASS, STANDARD_GRAVITY, 2.0 * PI * 930.0).unwrap()
    }

    #[test]
    fn cesium_kbar_is_close_to_one() {
        let u = cesium();
        // ħω³/(Mg²) evaluated by hand: 0.99589
        assert_relative_eq!(u.kbar, 0.99589, max_relative = 1e-4);
        assert!((u.kbar - 1.0).abs() < 0.01);
    }

    #[test]
    fn cesium_length_scale() {
        let u = cesium();
        assert_relative_eq!(u.length_scale, 9.8 / (2.0 * PI * 930.0_f64).powi(2), max_relative = 1e-14);
        assert_relative_eq!(u.length_scale, 2.870e-7, max_relative = 1e-3);
    }

    #[test]
    fn bouncer_heights() {
        let u = cesium();
        assert_relative_eq!(u.to_dimensionless_position(29.8e-6), 103.83, max_relative = 1e-3);
        assert_relative_eq!(u.to_dimensionless_position(20.1e-6), 70.03, max_relative = 1e-3);
        assert_eq!(to_dimensionless_position(0.0, &u), 0.0);
    }

    #[test]
    fn doubling_frequency_multiplies_kbar_by_eight() {
        let a = derive_units(CESIUM_MASS, 9.8, 1000.0).unwrap();
        let b = derive_units(CESIUM_MASS, 9.8, 2000.0).unwrap();
        assert_relative_eq!(b.kbar / a.kbar, 8.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(matches!(derive_units(0.0, 9.8, 1.0), Err(Error::Domain(_))));
        assert!(matches!(derive_units(1.0, -9.8, 1.0), Err(Error::Domain(_))));
        assert!(matches!(derive_units(1.0, 9.8, f64::NAN), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn position_round_trip(z in -1e-3f64..1e-3, w in 10.0f64..1e5) {
            let u = derive_units(CESIUM_MASS, 9.8, w).unwrap();
            let back = u.to_lab_position(u.to_dimensionless_position(z));
            prop_assert!((back - z).abs() <= 1e-12 * z.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn kbar_is_cubic_in_frequency(w in 1.0f64..1e5, c in 0.1f64..10.0) {
            let a = derive_units(CESIUM_MASS, 9.8, w).unwrap();
            let b = derive_units(CESIUM_MASS, 9.8, c * w).unwrap();
            prop_assert!((b.kbar / a.kbar / c.powi(3) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn scales_are_consistent(m in 1e-27f64..1e-24, g in 1.0f64..20.0, w in 1.0f64..1e5) {
            let u = derive_units(m, g, w).unwrap();
            prop_assert!(u.length_scale > 0.0 && u.time_scale > 0.0 && u.energy_scale > 0.0);
            prop_assert!((u.energy_scale / (m * u.length_scale * u.length_scale / (u.time_scale * u.time_scale)) - 1.0).abs() < 1e-12);
            prop_assert!((u.kbar / (HBAR * w.powi(3) / (m * g * g)) - 1.0).abs() < 1e-12);
        }
    }
}
