//! Unit system and per-particle constants.
//!
//! Everything runs in natural units with `c = ε₀ = 1`. Temperature is carried
//! as an energy (`k_B T`) and `ħ = 0` selects classical noise statistics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in internal units.
pub const SPEED_OF_LIGHT: f64 = 1.0;
/// Vacuum permittivity in internal units.
pub const EPSILON_0: f64 = 1.0;
/// Radiation-reaction coupling `1/(12π ε₀ c³)`.
pub const GAMMA0: f64 = 1.0 / (12.0 * PI * EPSILON_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT * SPEED_OF_LIGHT);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitConvention {
    #[default]
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnitSystem {
    #[serde(default)]
    pub convention: UnitConvention,
    #[serde(default)]
    pub hbar: f64,
    #[serde(default)]
    pub kb_t: f64,
}

impl UnitSystem {
    pub fn classical(kb_t: f64) -> Self {
        UnitSystem { convention: UnitConvention::Natural, hbar: 0.0, kb_t }
    }

    pub fn quantum(hbar: f64, kb_t: f64) -> Self {
        UnitSystem { convention: UnitConvention::Natural, hbar, kb_t }
    }

    pub fn validate(&self, errors: &mut Vec<String>) {
        if !(self.hbar.is_finite() && self.hbar >= 0.0) {
            errors.push(format!("units.hbar must be finite and >= 0, got {}", self.hbar));
        }
        if !(self.kb_t.is_finite() && self.kb_t >= 0.0) {
            errors.push(format!("units.kb_t must be finite and >= 0, got {}", self.kb_t));
        }
    }
}

/// `γ₀ = 1/(12π ε₀ c³)`; exactly `1/(12π)` in natural units.
pub fn gamma0(units: &UnitSystem) -> f64 {
    match units.convention {
        UnitConvention::Natural => GAMMA0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    #[serde(default)]
    pub label: String,
    /// Renormalized (observed) mass.
    pub mass: f64,
    pub charge: f64,
}

impl ParticleSpec {
    pub fn new(label: impl Into<String>, mass: f64, charge: f64) -> Result<Self> {
        let p = ParticleSpec { label: label.into(), mass, charge };
        let mut errors = Vec::new();
        p.validate("particle", &mut errors);
        if errors.is_empty() {
            Ok(p)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub(crate) fn validate(&self, ctx: &str, errors: &mut Vec<String>) {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            errors.push(format!("{ctx}.mass must be finite and > 0, got {}", self.mass));
        }
        if !self.charge.is_finite() {
            errors.push(format!("{ctx}.charge must be finite, got {}", self.charge));
        }
    }

    /// Charge-to-mass ratio `e/m`.
    pub fn charge_ratio(&self) -> f64 {
        self.charge / self.mass
    }
}

/// Backreaction timescale `τ_m = e²/(6π ε₀ m c³)`.
pub fn tau_m(particle: &ParticleSpec, units: &UnitSystem) -> f64 {
    match units.convention {
        UnitConvention::Natural => {
            let c = SPEED_OF_LIGHT;
            particle.charge * particle.charge / (6.0 * PI * EPSILON_0 * particle.mass * c * c * c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma0_natural_units() {
        let u = UnitSystem::default();
        assert_eq!(gamma0(&u), 1.0 / (12.0 * PI));
        assert!((gamma0(&u) - 0.026_525_823_848_649_22).abs() < 1e-17);
        assert!(gamma0(&u) > 0.0);
    }

    #[test]
    fn tau_m_values() {
        let u = UnitSystem::default();
        let p = ParticleSpec::new("e", 1.0, 1.0).unwrap();
        // 1/(6π) from a 30-digit evaluation
        assert!((tau_m(&p, &u) - 0.053_051_647_697_298_445).abs() < 1e-17);
        let neutral = ParticleSpec::new("n", 1.0, 0.0).unwrap();
        assert_eq!(tau_m(&neutral, &u), 0.0);
        let double = ParticleSpec::new("d", 1.0, 2.0).unwrap();
        assert!((tau_m(&double, &u) - 4.0 * tau_m(&p, &u)).abs() < 1e-16);
    }

    #[test]
    fn tau_m_equals_twice_charge_squared_gamma0_over_mass() {
        let u = UnitSystem::default();
        let p = ParticleSpec::new("e", 1.0, 1.0).unwrap();
        assert!((2.0 * gamma0(&u) - tau_m(&p, &u)).abs() < 1e-17);
    }

    #[test]
    fn rejects_bad_particles() {
        assert!(ParticleSpec::new("x", 0.0, 1.0).is_err());
        assert!(ParticleSpec::new("x", -1.0, 1.0).is_err());
        assert!(ParticleSpec::new("x", 1.0, f64::NAN).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tau_m_identity(mass in 1e-3f64..1e3, charge in -10.0f64..10.0) {
                let u = UnitSystem::default();
                let p = ParticleSpec::new("p", mass, charge).unwrap();
                let lhs = tau_m(&p, &u);
                let rhs = 2.0 * charge * charge * gamma0(&u) / mass;
                prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
}
