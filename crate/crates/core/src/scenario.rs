//! Scenario description, defaults and validation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{ExternalPotential, ForceField};
use crate::kernels::KernelSpec;
use crate::model::SystemState;
use crate::noise::NoiseSpec;
use crate::units::{tau_m, ParticleSpec, UnitSystem};
use crate::Vec3;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationFamily {
    #[serde(rename = "consistent_1_over_c3")]
    Consistent1OverC3,
    ConsistentRelativistic,
    AbrahamLorentz,
    FordOConnell,
    Qbm,
}

impl EquationFamily {
    pub fn is_single_particle(self) -> bool {
        matches!(self, EquationFamily::AbrahamLorentz | EquationFamily::FordOConnell | EquationFamily::Qbm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Interactions {
    pub coulomb: bool,
    pub darwin: bool,
    /// Plummer softening length.
    pub softening: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSettings {
    /// When false the run is noise-free regardless of temperature.
    pub enabled: bool,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        NoiseSettings { enabled: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QbmMode {
    #[default]
    OhmicLocal,
    Nonlocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct QbmSettings {
    pub mode: QbmMode,
    pub slip: bool,
    /// Memory window; `None` selects `40π/Λ`.
    pub memory_window: Option<f64>,
}

pub const DEFAULT_MEMORY_PERIODS: f64 = 40.0;
pub const MIN_MEMORY_PERIODS: f64 = 6.0;

impl QbmSettings {
    pub fn window(&self, kernel: &KernelSpec) -> f64 {
        self.memory_window.unwrap_or(DEFAULT_MEMORY_PERIODS * PI / kernel.cutoff_lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InitialState {
    pub positions: Vec<[f64; 3]>,
    pub momenta: Vec<[f64; 3]>,
    /// Initial accelerations, Abraham-Lorentz only; zero when omitted.
    #[serde(default)]
    pub accelerations: Option<Vec<[f64; 3]>>,
}

fn default_record_stride() -> usize {
    1
}
fn default_runaway_bound() -> f64 {
    1e6
}
fn default_replicas() -> usize {
    1
}
fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub units: UnitSystem,
    pub particles: Vec<ParticleSpec>,
    pub initial: InitialState,
    pub equation_family: EquationFamily,
    #[serde(default)]
    pub external_potential: ExternalPotential,
    #[serde(default)]
    pub interactions: Interactions,
    #[serde(default)]
    pub noise: NoiseSettings,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub qbm: QbmSettings,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_record_stride")]
    pub record_stride: usize,
    /// Runaway threshold as a multiple of the initial characteristic scale.
    #[serde(default = "default_runaway_bound")]
    pub runaway_bound: f64,
    /// Independent noise replicas for ensemble statistics.
    #[serde(default = "default_replicas")]
    pub replicas: usize,
}

fn to_vecs(a: &[[f64; 3]]) -> Vec<Vec3> {
    a.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect()
}

impl Scenario {
    /// Minimal single-particle scenario with defaults for everything else.
    pub fn single(family: EquationFamily, particle: ParticleSpec, x0: [f64; 3], p0: [f64; 3], dt: f64, t_end: f64) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            units: UnitSystem::default(),
            particles: vec![particle],
            initial: InitialState { positions: vec![x0], momenta: vec![p0], accelerations: None },
            equation_family: family,
            external_potential: ExternalPotential::None,
            interactions: Interactions::default(),
            noise: NoiseSettings::default(),
            kernel: KernelSpec::default(),
            qbm: QbmSettings::default(),
            dt,
            t_end,
            seed: 0,
            record_stride: 1,
            runaway_bound: default_runaway_bound(),
            replicas: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.particles.len()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec { kb_t: self.units.kb_t, hbar: self.units.hbar, kernel: self.kernel }
    }

    /// True when a non-vanishing noise realization is needed.
    pub fn noise_active(&self) -> bool {
        self.noise.enabled && !self.noise_spec().is_silent() && self.particles.iter().any(|p| p.charge != 0.0)
    }

    pub fn force_field(&self) -> ForceField {
        let darwin = self.interactions.darwin && self.n() >= 2;
        ForceField::new(
            self.particles.clone(),
            self.interactions.coulomb,
            darwin,
            self.external_potential.clone(),
            self.interactions.softening,
        )
    }

    pub fn initial_state(&self) -> SystemState {
        let mut s = SystemState::new(to_vecs(&self.initial.positions), to_vecs(&self.initial.momenta));
        if self.equation_family == EquationFamily::AbrahamLorentz {
            s.aux = Some(match &self.initial.accelerations {
                Some(a) => to_vecs(a),
                None => vec![Vec3::zeros(); self.n()],
            });
        }
        s
    }

    /// Every violated rule, in a stable order.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut e = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            e.push(format!("schema_version must be {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        self.units.validate(&mut e);
        self.kernel.validate(&mut e);
        self.external_potential.validate(&mut e);
        let n = self.n();
        if n == 0 {
            e.push("particles must not be empty".into());
        }
        if n > 64 {
            e.push(format!("at most 64 particles are supported, got {n}"));
        }
        for (i, p) in self.particles.iter().enumerate() {
            p.validate(&format!("particles[{i}]"), &mut e);
        }
        if self.initial.positions.len() != n {
            e.push(format!("initial.positions has {} entries for {n} particles", self.initial.positions.len()));
        }
        if self.initial.momenta.len() != n {
            e.push(format!("initial.momenta has {} entries for {n} particles", self.initial.momenta.len()));
        }
        let finite = |a: &[[f64; 3]]| a.iter().flatten().all(|v| v.is_finite());
        if !finite(&self.initial.positions) || !finite(&self.initial.momenta) {
            e.push("initial state must be finite".into());
        }
        if let Some(a) = &self.initial.accelerations {
            if self.equation_family != EquationFamily::AbrahamLorentz {
                e.push("initial.accelerations is only meaningful for abraham_lorentz".into());
            }
            if a.len() != n || !finite(a) {
                e.push(format!("initial.accelerations must have {n} finite entries"));
            }
        }
        if self.equation_family.is_single_particle() && n != 1 {
            e.push(format!("equation_family {:?} is a single-particle model, got {n} particles", self.equation_family));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            e.push(format!("dt must be finite and > 0, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            e.push(format!("t_end must be finite and > 0, got {}", self.t_end));
        }
        if self.dt.is_finite() && self.t_end.is_finite() && self.dt >= self.t_end {
            e.push(format!("dt ({}) must be smaller than t_end ({})", self.dt, self.t_end));
        }
        if let Some(w0) = self.external_potential.omega0() {
            if w0 > 0.0 && self.dt > 0.1 / w0 {
                e.push(format!("dt = {} exceeds the timescale bound 0.1/omega0 = {}", self.dt, 0.1 / w0));
            }
        }
        if self.equation_family == EquationFamily::AbrahamLorentz {
            let tau = self
                .particles
                .iter()
                .map(|p| if p.mass > 0.0 { tau_m(p, &self.units) } else { f64::NAN })
                .fold(f64::INFINITY, f64::min);
            if !(tau > 0.0) {
                e.push("abraham_lorentz requires a charged particle (tau_m > 0)".into());
            } else if self.dt > 0.1 * tau {
                e.push(format!("dt = {} exceeds the timescale bound 0.1*tau_m = {}", self.dt, 0.1 * tau));
            }
        }
        let nonlocal = self.equation_family == EquationFamily::Qbm && self.qbm.mode == QbmMode::Nonlocal;
        if (self.noise_active() || nonlocal) && self.kernel.cutoff_lambda * self.dt >= PI {
            e.push(format!(
                "cutoff_lambda * dt = {} must be below pi when noise or nonlocal memory is active",
                self.kernel.cutoff_lambda * self.dt
            ));
        }
        if nonlocal {
            let w = self.qbm.window(&self.kernel);
            let need = MIN_MEMORY_PERIODS * PI / self.kernel.cutoff_lambda;
            if !(w >= need) {
                e.push(format!("qbm.memory_window = {w} is below 6*pi/cutoff_lambda = {need}"));
            }
        }
        if self.record_stride == 0 {
            e.push("record_stride must be >= 1".into());
        }
        if !(self.runaway_bound.is_finite() && self.runaway_bound > 0.0) {
            e.push(format!("runaway_bound must be finite and > 0, got {}", self.runaway_bound));
        }
        if self.replicas == 0 {
            e.push("replicas must be >= 1".into());
        }
        if self.interactions.softening < 0.0 || !self.interactions.softening.is_finite() {
            e.push("interactions.softening must be finite and >= 0".into());
        }
        e
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.validation_errors();
        if e.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> Scenario {
        let mut s = Scenario::single(
            EquationFamily::Consistent1OverC3,
            ParticleSpec::new("e", 1.0, 0.1).unwrap(),
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            0.01,
            10.0,
        );
        s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
        s
    }

    #[test]
    fn valid_scenario_passes() {
        assert!(harmonic().validate().is_ok());
    }

    #[test]
    fn collects_every_error() {
        let mut s = harmonic();
        s.dt = 0.5;
        s.record_stride = 0;
        s.particles[0].mass = -1.0;
        let e = s.validation_errors();
        assert!(e.iter().any(|m| m.contains("0.1/omega0")));
        assert!(e.iter().any(|m| m.contains("record_stride")));
        assert!(e.iter().any(|m| m.contains("mass")));
    }

    #[test]
    fn nyquist_only_with_noise() {
        let mut s = harmonic();
        s.kernel = KernelSpec::hard(1000.0);
        assert!(s.validate().is_ok());
        s.units.kb_t = 1.0;
        assert!(s.validation_errors().iter().any(|m| m.contains("below pi")));
        s.noise.enabled = false;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn single_particle_families() {
        let mut s = harmonic();
        s.equation_family = EquationFamily::FordOConnell;
        s.particles.push(s.particles[0].clone());
        s.initial.positions.push([0.0; 3]);
        s.initial.momenta.push([0.0; 3]);
        assert!(s.validation_errors().iter().any(|m| m.contains("single-particle")));
    }

    #[test]
    fn abraham_lorentz_bound() {
        let mut s = harmonic();
        s.equation_family = EquationFamily::AbrahamLorentz;
        assert!(s.validation_errors().iter().any(|m| m.contains("tau_m")));
        s.dt = 1e-5;
        s.t_end = 1e-3;
        assert!(s.validate().is_ok());
        s.particles[0].charge = 0.0;
        assert!(s.validation_errors().iter().any(|m| m.contains("charged")));
    }

    #[test]
    fn serde_round_trip() {
        let s = harmonic();
        let text = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
