use serde::{Deserialize, Serialize};

use crate::Vec3;

/// Phase-space state of `N` particles.
///
/// `momenta` are canonical for the consistent families and mechanical
/// (`m ẋ`) for the others. `aux` holds accelerations for the third-order
/// Abraham-Lorentz state and is `None` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub time: f64,
    pub positions: Vec<Vec3>,
    pub momenta: Vec<Vec3>,
    pub aux: Option<Vec<Vec3>>,
}

impl SystemState {
    pub fn new(positions: Vec<Vec3>, momenta: Vec<Vec3>) -> Self {
        SystemState { time: 0.0, positions, momenta, aux: None }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn is_finite(&self) -> bool {
        let ok = |v: &[Vec3]| v.iter().all(|x| x.iter().all(|c| c.is_finite()));
        self.time.is_finite()
            && ok(&self.positions)
            && ok(&self.momenta)
            && self.aux.as_deref().is_none_or(ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    RunawayDetected { time: f64 },
    NumericalFailure { time: f64 },
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::RunawayDetected { .. } => "runaway_detected",
            RunStatus::NumericalFailure { .. } => "numerical_failure",
        }
    }
}

/// One recorded sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: SystemState,
    /// Coordinate velocity `ẋ` at the sample time.
    pub velocities: Vec<Vec3>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: RunStatus,
    pub record_stride: usize,
    pub dt: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.time).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Component `c` of particle `i` position.
    pub fn position_series(&self, i: usize, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.positions[i][c]).collect()
    }

    pub fn momentum_series(&self, i: usize, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.momenta[i][c]).collect()
    }

    pub fn velocity_series(&self, i: usize, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.velocities[i][c]).collect()
    }

    pub fn aux_series(&self, i: usize, c: usize) -> Option<Vec<f64>> {
        self.samples.iter().map(|s| s.state.aux.as_ref().map(|a| a[i][c])).collect()
    }
}

/// `H_sys(t) = H_sys(0) + H_γ(t) + H_ξ(t)` bookkeeping.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub h_sys: Vec<f64>,
    /// Cumulative energy change from damping (and slip, when enabled).
    pub h_gamma: Vec<f64>,
    /// Cumulative work done by the noise.
    pub h_xi: Vec<f64>,
    pub residual: Vec<f64>,
}

impl EnergyLedger {
    pub fn push(&mut self, t: f64, h_sys: f64, h_gamma: f64, h_xi: f64) {
        let h0 = self.h_sys.first().copied().unwrap_or(h_sys);
        self.times.push(t);
        self.h_sys.push(h_sys);
        self.h_gamma.push(h_gamma);
        self.h_xi.push(h_xi);
        self.residual.push(h_sys - h0 - h_gamma - h_xi);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Energy scale used for relative residuals: the largest magnitude among
    /// `H_sys`, `H_γ` and `H_ξ` over the run.
    pub fn energy_scale(&self) -> f64 {
        self.h_sys
            .iter()
            .chain(&self.h_gamma)
            .chain(&self.h_xi)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn relative_residual(&self) -> f64 {
        let s = self.energy_scale();
        if s == 0.0 {
            self.max_abs_residual()
        } else {
            self.max_abs_residual() / s
        }
    }
}
