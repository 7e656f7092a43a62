//! Canned scenarios with a quick physics check each, run by `emlangevin demo`.

use crate::diagnostics::{energy_audit, equipartition_ensemble, fit_growth_rate};
use crate::error::Result;
use crate::forces::ExternalPotential;
use crate::integrators::{run_ensemble, RunOutput};
use crate::model::{RunStatus, Trajectory};
use crate::scenario::{EquationFamily, Interactions, Scenario};
use crate::units::{tau_m, ParticleSpec, UnitSystem};
use crate::Vec3;

/// Charge giving `τ_m = tau` at unit mass.
pub fn charge_for_tau(tau: f64) -> f64 {
    (6.0 * std::f64::consts::PI * tau).sqrt()
}

/// Unit-mass particle in a unit-frequency well, displaced along x.
pub fn harmonic_well(family: EquationFamily, tau: f64, dt: f64, t_end: f64) -> Scenario {
    let p = ParticleSpec::new("q", 1.0, charge_for_tau(tau)).expect("valid particle");
    let mut s = Scenario::single(family, p, [1.0, 0.0, 0.0], [0.0; 3], dt, t_end);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s
}

/// Free unit charge, moving, with a nonzero initial acceleration.
pub fn runaway() -> Scenario {
    let p = ParticleSpec::new("e", 1.0, 1.0).expect("valid particle");
    let tau = tau_m(&p, &UnitSystem::default());
    let mut s = Scenario::single(EquationFamily::AbrahamLorentz, p, [0.0; 3], [0.0, 0.1, 0.0], 0.01 * tau, 40.0 * tau);
    s.initial.accelerations = Some(vec![[1.0, 0.0, 0.0]]);
    s
}

/// Classical thermal QBM oscillator, several replicas.
pub fn thermal_qbm(replicas: usize, t_end: f64) -> Scenario {
    let p = ParticleSpec::new("q", 1.0, 2.0).expect("valid particle");
    let mut s = Scenario::single(EquationFamily::Qbm, p, [0.0; 3], [0.0; 3], 0.05, t_end);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s.units = UnitSystem::classical(1.0);
    s.kernel.cutoff_lambda = 10.0;
    s.record_stride = 4;
    s.replicas = replicas;
    s.seed = 2024;
    s
}

/// Two like charges with Coulomb and Darwin interactions.
pub fn darwin_pair(steps: usize) -> Scenario {
    let ps = vec![ParticleSpec::new("a", 1.0, 1.0).unwrap(), ParticleSpec::new("b", 2.0, 0.5).unwrap()];
    let mut s = Scenario::single(EquationFamily::Consistent1OverC3, ps[0].clone(), [0.0; 3], [0.0; 3], 1e-3, 1e-3 * steps as f64);
    s.particles = ps;
    s.initial.positions = vec![[-0.5, 0.1, 0.0], [0.5, -0.1, 0.2]];
    s.initial.momenta = vec![[0.3, 0.2, -0.1], [-0.1, 0.4, 0.25]];
    s.interactions = Interactions { coulomb: true, darwin: true, softening: 0.0 };
    s.record_stride = 100;
    s
}

/// Weakly charged relativistic particle in a unit well, launched at
/// `|p|/m = gamma_v`.
pub fn relativistic(gamma_v: f64) -> Scenario {
    let p = ParticleSpec::new("e", 1.0, 1e-3).unwrap();
    let mut s = Scenario::single(EquationFamily::ConsistentRelativistic, p, [0.0; 3], [gamma_v, 0.0, 0.0], 0.01, 20.0);
    s.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    s
}

pub fn total_momentum(traj: &Trajectory, k: usize) -> Vec3 {
    traj.samples[k].state.momenta.iter().sum()
}

pub fn max_speed(traj: &Trajectory) -> f64 {
    traj.samples.iter().flat_map(|s| s.velocities.iter().map(|v| v.norm())).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct DemoResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub scenario: Scenario,
    pub outputs: Vec<RunOutput>,
}

type Check = fn(&Scenario, &[RunOutput]) -> Result<(bool, String)>;

fn check_runaway(s: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let tau = tau_m(&s.particles[0], &s.units);
    let t = &out[0].trajectory;
    let a: Vec<f64> = t.samples.iter().map(|x| x.state.aux.as_ref().unwrap()[0].norm()).collect();
    let fit = fit_growth_rate(&a, s.dt * s.record_stride as f64)?;
    let ok = matches!(t.status, RunStatus::RunawayDetected { .. }) && (fit.rate * tau - 1.0).abs() < 0.02;
    Ok((ok, format!("status {}, rate*tau_m = {:.5}", t.status.label(), fit.rate * tau)))
}

fn check_damping(s: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let tau = tau_m(&s.particles[0], &s.units);
    let fit = fit_growth_rate(&out[0].ledger.h_sys, s.dt * s.record_stride as f64)?;
    let ratio = -fit.rate / tau;
    Ok(((ratio - 1.0).abs() < 0.02, format!("energy decay rate / (tau_m w0^2) = {ratio:.5}")))
}

fn check_ledger(s: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let a = energy_audit(&out[0].trajectory, &out[0].ledger, s)?;
    let ok = a.relative_residual < 1e-6 && a.h_gamma_nonincreasing && a.h_xi_zero;
    Ok((ok, format!("relative residual {:.2e}, H_gamma nonincreasing {}", a.relative_residual, a.h_gamma_nonincreasing)))
}

fn check_equipartition(s: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let trajs: Vec<Trajectory> = out.iter().map(|o| o.trajectory.clone()).collect();
    let r = equipartition_ensemble(&trajs, s)?;
    Ok(((r - 1.0).abs() < 0.03, format!("<x^2> m w0^2 / kT = {r:.4}")))
}

fn check_momentum(_: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let t = &out[0].trajectory;
    let p0 = total_momentum(t, 0);
    let scale: f64 = t.samples[0].state.momenta.iter().map(|p| p.norm()).sum();
    let drift = (0..t.samples.len()).map(|k| (total_momentum(t, k) - p0).norm()).fold(0.0, f64::max) / scale;
    Ok((drift < 1e-10 && t.status == RunStatus::Completed, format!("relative momentum drift {drift:.2e}")))
}

fn check_speed(_: &Scenario, out: &[RunOutput]) -> Result<(bool, String)> {
    let v = max_speed(&out[0].trajectory);
    Ok((v < 1.0, format!("max |v| = 1 - {:.3e}", 1.0 - v)))
}

/// The canned scenarios in the order `demo` runs them.
pub fn cases() -> Vec<(&'static str, Scenario, Check)> {
    let damped = |fam| {
        let mut s = harmonic_well(fam, 1e-2, 0.05, 200.0);
        s.record_stride = 20;
        s
    };
    vec![
        ("abraham_lorentz_runaway", runaway(), check_runaway as Check),
        ("consistent_damping", damped(EquationFamily::Consistent1OverC3), check_damping),
        ("ford_oconnell_damping", damped(EquationFamily::FordOConnell), check_damping),
        ("consistent_energy_ledger", damped(EquationFamily::Consistent1OverC3), check_ledger),
        ("qbm_equipartition", thermal_qbm(16, 8000.0), check_equipartition),
        ("darwin_pair", darwin_pair(10_000), check_momentum),
        ("relativistic", relativistic(1e3), check_speed),
    ]
}

/// Runs every canned scenario.
pub fn run_all() -> Result<Vec<DemoResult>> {
    cases()
        .into_iter()
        .map(|(name, scenario, check)| {
            let outputs = run_ensemble(&scenario)?;
            let (passed, detail) = check(&scenario, &outputs)?;
            Ok(DemoResult { name, passed, detail, scenario, outputs })
        })
        .collect()
}
