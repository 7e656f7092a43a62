//! Fixed-step time integration of all equation families.
//!
//! The consistent, Ford–O'Connell and Abraham-Lorentz families use classical
//! RK4 with the band-limited noise treated as a smooth input sampled at the
//! step start, midpoint and end. The energy ledger integrals are carried as
//! extra RK4 components, so they close to integrator accuracy along every
//! noise path. QBM uses velocity Verlet with a history convolution.

pub mod abraham_lorentz;
pub mod consistent;
pub mod ford_oconnell;
pub mod qbm;
pub mod rk4;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::model::{EnergyLedger, RunStatus, Sample, SystemState, Trajectory};
use crate::noise::{synthesize_samples, NoiseRealization, MIN_SAMPLES};
use crate::scenario::{EquationFamily, Scenario};
use crate::Vec3;

pub use abraham_lorentz::step_abraham_lorentz;
pub use consistent::step_consistent;
pub use ford_oconnell::step_ford_oconnell;
pub use qbm::{MemoryBuffer, QbmStepper};

/// Noise values for every particle at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSample {
    pub xi: Vec<Vec3>,
    pub dxi: Vec<Vec3>,
    pub ddxi: Vec<Vec3>,
}

impl NoiseSample {
    pub fn zeros(n: usize) -> Self {
        NoiseSample { xi: vec![Vec3::zeros(); n], dxi: vec![Vec3::zeros(); n], ddxi: vec![Vec3::zeros(); n] }
    }

    pub fn from_realization(r: &NoiseRealization, k: usize) -> Self {
        let n = r.n_particles();
        NoiseSample {
            xi: (0..n).map(|i| r.xi_at(i, k)).collect(),
            dxi: (0..n).map(|i| r.dxi_at(i, k)).collect(),
            ddxi: (0..n).map(|i| r.ddxi_at(i, k)).collect(),
        }
    }
}

/// Noise at the start, midpoint and end of an RK4 step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepNoise {
    pub start: NoiseSample,
    pub mid: NoiseSample,
    pub end: NoiseSample,
}

impl StepNoise {
    pub fn zeros(n: usize) -> Self {
        StepNoise { start: NoiseSample::zeros(n), mid: NoiseSample::zeros(n), end: NoiseSample::zeros(n) }
    }
}

/// Energy changes accumulated over one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LedgerIncrement {
    pub d_gamma: f64,
    pub d_xi: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub ledger: EnergyLedger,
    pub seed: u64,
}

/// Seed of ensemble replica `r`, independent of the noise stream layout.
pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - replica as u64);
    rng.next_u64()
}

fn noise_for(s: &Scenario, seed: u64, spacing: f64, len: usize) -> Result<Option<NoiseRealization>> {
    if !s.noise_active() {
        return Ok(None);
    }
    let r = synthesize_samples(&s.noise_spec(), s.n(), len.max(MIN_SAMPLES), spacing, seed)?;
    Ok(Some(r))
}

fn sample_at(noise: &Option<NoiseRealization>, n: usize, k: usize) -> NoiseSample {
    match noise {
        Some(r) => NoiseSample::from_realization(r, k),
        None => NoiseSample::zeros(n),
    }
}

fn system_energy(s: &Scenario, ff: &ForceField, st: &SystemState) -> Result<f64> {
    match s.equation_family {
        EquationFamily::Consistent1OverC3 => consistent::system_energy(ff, &st.positions, &st.momenta, false),
        EquationFamily::ConsistentRelativistic => consistent::system_energy(ff, &st.positions, &st.momenta, true),
        _ => {
            let m = ff.particles[0].mass;
            Ok(0.5 * st.momenta[0].norm_squared() / m + ff.external_energy(&st.positions))
        }
    }
}

fn coordinate_velocity(s: &Scenario, ff: &ForceField, st: &SystemState, xi: &[Vec3]) -> Result<Vec<Vec3>> {
    match s.equation_family {
        EquationFamily::Consistent1OverC3 | EquationFamily::ConsistentRelativistic => {
            let rel = s.equation_family == EquationFamily::ConsistentRelativistic;
            Ok(consistent::velocities(ff, &st.positions, &st.momenta, xi, rel)?.0)
        }
        _ => Ok(st.momenta.iter().zip(&ff.particles).map(|(p, sp)| p / sp.mass).collect()),
    }
}

struct Recorder {
    samples: Vec<Sample>,
    ledger: EnergyLedger,
    h_gamma: f64,
    h_xi: f64,
}

impl Recorder {
    fn record(&mut self, s: &Scenario, ff: &ForceField, st: &SystemState, xi: &[Vec3]) -> Result<()> {
        let h = system_energy(s, ff, st)?;
        let v = coordinate_velocity(s, ff, st, xi)?;
        self.samples.push(Sample { state: st.clone(), velocities: v });
        self.ledger.push(st.time, h, self.h_gamma, self.h_xi);
        Ok(())
    }
}

fn exceeds(st: &SystemState, bound: f64) -> bool {
    st.positions.iter().chain(&st.momenta).any(|v| v.norm() > bound)
}

/// Runs one realization with the scenario seed.
pub fn run(s: &Scenario) -> Result<RunOutput> {
    run_with_seed(s, s.seed)
}

/// Runs one realization with an explicit noise seed.
pub fn run_with_seed(s: &Scenario, seed: u64) -> Result<RunOutput> {
    s.validate()?;
    let ff = s.force_field();
    let n = s.n();
    let dt = s.dt;
    let steps = s.steps();
    let mut st = s.initial_state();
    let scale = st.positions.iter().chain(&st.momenta).fold(1.0f64, |m, v| m.max(v.norm()));
    let bound = s.runaway_bound * scale;

    let qbm = s.equation_family == EquationFamily::Qbm;
    // RK4 families read noise at half steps
    let (spacing, per_step) = if qbm { (dt, 1) } else { (0.5 * dt, 2) };
    let noise = noise_for(s, seed, spacing, per_step * steps + 1)?;

    let mut rec = Recorder { samples: Vec::new(), ledger: EnergyLedger::default(), h_gamma: 0.0, h_xi: 0.0 };
    let first = sample_at(&noise, n, 0);
    match rec.record(s, &ff, &st, &first.xi) {
        Ok(()) => {}
        // unusable initial state: an empty trajectory carrying the status
        Err(Error::Singular { .. }) | Err(Error::NonFinite { .. }) => {
            return Ok(RunOutput {
                trajectory: Trajectory {
                    samples: Vec::new(),
                    status: RunStatus::NumericalFailure { time: 0.0 },
                    record_stride: s.record_stride,
                    dt,
                },
                ledger: EnergyLedger::default(),
                seed,
            });
        }
        Err(e) => return Err(e),
    }

    let mut qbm_stepper = if qbm {
        Some(QbmStepper::new(&st, &ff, &s.kernel, s.qbm.mode, s.qbm.slip, s.qbm.window(&s.kernel), dt, first.xi[0])?)
    } else {
        None
    };

    let mut status = RunStatus::Completed;
    for k in 0..steps {
        let result = match s.equation_family {
            EquationFamily::Qbm => {
                let xi = sample_at(&noise, n, k + 1).xi[0];
                qbm_stepper.as_mut().expect("qbm stepper").step_qbm(&st, &ff, xi, dt)
            }
            fam => {
                let sn = StepNoise {
                    start: sample_at(&noise, n, 2 * k),
                    mid: sample_at(&noise, n, 2 * k + 1),
                    end: sample_at(&noise, n, 2 * k + 2),
                };
                match fam {
                    EquationFamily::Consistent1OverC3 => step_consistent(&st, &ff, &sn, dt, false),
                    EquationFamily::ConsistentRelativistic => step_consistent(&st, &ff, &sn, dt, true),
                    EquationFamily::AbrahamLorentz => step_abraham_lorentz(&st, &ff, &sn, dt),
                    EquationFamily::FordOConnell => step_ford_oconnell(&st, &ff, &sn, dt),
                    EquationFamily::Qbm => unreachable!(),
                }
            }
        };
        let t_next = (k + 1) as f64 * dt;
        let (mut next, inc) = match result {
            Ok(v) => v,
            Err(Error::Singular { .. }) | Err(Error::NonFinite { .. }) => {
                status = RunStatus::NumericalFailure { time: t_next };
                break;
            }
            Err(e) => return Err(e),
        };
        // fixed grid times, free of accumulated rounding
        next.time = t_next;
        if !next.is_finite() || !inc.d_gamma.is_finite() || !inc.d_xi.is_finite() {
            status = RunStatus::NumericalFailure { time: t_next };
            break;
        }
        rec.h_gamma += inc.d_gamma;
        rec.h_xi += inc.d_xi;
        st = next;
        if exceeds(&st, bound) {
            status = RunStatus::RunawayDetected { time: t_next };
            break;
        }
        if (k + 1) % s.record_stride == 0 {
            let xi = sample_at(&noise, n, per_step * (k + 1)).xi;
            rec.record(s, &ff, &st, &xi)?;
        }
    }

    Ok(RunOutput {
        trajectory: Trajectory { samples: rec.samples, status, record_stride: s.record_stride, dt },
        ledger: rec.ledger,
        seed,
    })
}

/// Runs `s.replicas` independent realizations in parallel, in replica order.
pub fn run_ensemble(s: &Scenario) -> Result<Vec<RunOutput>> {
    s.validate()?;
    (0..s.replicas).into_par_iter().map(|r| run_with_seed(s, replica_seed(s.seed, r))).collect()
}
