//! Generalized Langevin equation with memory,
//! `m ẍ + 2e² (γ ∗ ẋ)(t) + ∇U = e ξ`, optionally with the slip force
//! `−e² γ(t) x(0)`.
//!
//! Velocity Verlet with an implicit instantaneous friction term. The history
//! integral `∫ γ(t − s) ẋ(s) ds` is a trapezoid sum over the memory window,
//! whose end-point weight `½ dt γ(0)` multiplies the unknown new velocity.
//! With the hard regulator and `Λ dt < π` the discrete one-sided kernel sum
//! is exactly `γ₀`, so the nonlocal scheme has the same low-frequency
//! friction as the local one.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::kernels::KernelSpec;
use crate::model::SystemState;
use crate::scenario::{QbmMode, MIN_MEMORY_PERIODS};
use crate::units::GAMMA0;
use crate::Vec3;

use super::LedgerIncrement;

/// Past velocities over the memory window with the kernel samples `γ(k dt)`.
#[derive(Debug, Clone)]
pub struct MemoryBuffer {
    kernel: Vec<f64>,
    history: VecDeque<Vec3>,
    dt: f64,
}

impl MemoryBuffer {
    pub fn new(spec: &KernelSpec, window: f64, dt: f64) -> Result<Self> {
        let required = MIN_MEMORY_PERIODS * std::f64::consts::PI / spec.cutoff_lambda;
        if !(window >= required) {
            return Err(Error::MemoryUnderrun { window, required });
        }
        let w = (window / dt).ceil() as usize;
        let kernel = (0..=w).map(|k| spec.local_gamma_time(k as f64 * dt)).collect();
        Ok(MemoryBuffer { kernel, history: VecDeque::with_capacity(w + 1), dt })
    }

    pub fn window_steps(&self) -> usize {
        self.kernel.len() - 1
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// Appends the newest velocity, dropping entries beyond the window.
    pub fn push(&mut self, v: Vec3) {
        if self.history.len() == self.kernel.len() {
            self.history.pop_back();
        }
        self.history.push_front(v);
    }

    /// History part of the trapezoid sum for the next time level, i.e. the
    /// sum over already stored velocities; index 0 is lag `dt`.
    fn remainder(&self) -> Vec3 {
        let hist = self.history.len().min(self.window_steps());
        let mut acc = Vec3::zeros();
        for j in 0..hist {
            let w = if j + 1 == hist { 0.5 } else { 1.0 };
            acc += self.history[j] * (w * self.kernel[j + 1]);
        }
        acc * self.dt
    }

    /// Weight of the unknown new velocity.
    fn kappa(&self) -> f64 {
        if self.history.is_empty() {
            0.0
        } else {
            0.5 * self.dt * self.kernel[0]
        }
    }
}

/// Stepper state carried between QBM steps.
#[derive(Debug, Clone)]
pub struct QbmStepper {
    pub mode: QbmMode,
    pub slip: bool,
    memory: Option<MemoryBuffer>,
    kernel: KernelSpec,
    x0: Vec3,
    /// Acceleration, friction and noise force at the current level.
    acc: Vec3,
    friction: Vec3,
    slip_force: Vec3,
    noise_force: Vec3,
}

impl QbmStepper {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        state: &SystemState,
        ff: &ForceField,
        kernel: &KernelSpec,
        mode: QbmMode,
        slip: bool,
        window: f64,
        dt: f64,
        xi0: Vec3,
    ) -> Result<Self> {
        let memory = match mode {
            QbmMode::Nonlocal => Some(MemoryBuffer::new(kernel, window, dt)?),
            QbmMode::OhmicLocal => None,
        };
        let p = &ff.particles[0];
        let (m, e) = (p.mass, p.charge);
        let x0 = state.positions[0];
        let v0 = state.momenta[0] / m;
        let friction = match mode {
            QbmMode::OhmicLocal => -v0 * (2.0 * e * e * GAMMA0),
            QbmMode::Nonlocal => Vec3::zeros(),
        };
        let slip_force = if slip { -x0 * (e * e * kernel.local_gamma_time(0.0)) } else { Vec3::zeros() };
        let noise_force = xi0 * e;
        let acc = (ff.external_force_one(0, &x0) + friction + slip_force + noise_force) / m;
        let mut s = QbmStepper { mode, slip, memory, kernel: *kernel, x0, acc, friction, slip_force, noise_force };
        if let Some(mem) = s.memory.as_mut() {
            mem.push(v0);
        }
        Ok(s)
    }

    fn power(&self, v: &Vec3) -> (f64, f64) {
        (v.dot(&(self.friction + self.slip_force)), v.dot(&self.noise_force))
    }

    /// Advances one step given the noise at the new time level.
    pub fn step_qbm(&mut self, state: &SystemState, ff: &ForceField, xi_next: Vec3, dt: f64) -> Result<(SystemState, LedgerIncrement)> {
        let p = &ff.particles[0];
        let (m, e) = (p.mass, p.charge);
        let x = state.positions[0];
        let v = state.momenta[0] / m;
        let (pg0, px0) = self.power(&v);

        let x1 = x + v * dt + self.acc * (0.5 * dt * dt);
        let t1 = state.time + dt;
        let (kappa, rem) = match (&self.mode, &self.memory) {
            (QbmMode::OhmicLocal, _) => (GAMMA0, Vec3::zeros()),
            (QbmMode::Nonlocal, Some(mem)) => (mem.kappa(), mem.remainder()),
            (QbmMode::Nonlocal, None) => unreachable!("nonlocal stepper without memory"),
        };
        let slip_force = if self.slip { -self.x0 * (e * e * self.kernel.local_gamma_time(t1)) } else { Vec3::zeros() };
        let noise_force = xi_next * e;
        let explicit = (ff.external_force_one(0, &x1) - rem * (2.0 * e * e) + slip_force + noise_force) / m;
        let c = 2.0 * e * e * kappa / m;
        let v1 = (v + (self.acc + explicit) * (0.5 * dt)) / (1.0 + 0.5 * dt * c);
        let acc1 = explicit - v1 * c;

        self.friction = -(rem + v1 * kappa) * (2.0 * e * e);
        self.slip_force = slip_force;
        self.noise_force = noise_force;
        self.acc = acc1;
        if let Some(mem) = self.memory.as_mut() {
            mem.push(v1);
        }
        let (pg1, px1) = self.power(&v1);
        let next = SystemState { time: t1, positions: vec![x1], momenta: vec![v1 * m], aux: None };
        Ok((next, LedgerIncrement { d_gamma: 0.5 * dt * (pg0 + pg1), d_xi: 0.5 * dt * (px0 + px1) }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_hard_kernel_sums_to_gamma0() {
        let spec = KernelSpec::hard(10.0);
        let dt = 0.05;
        let mem = MemoryBuffer::new(&spec, 2000.0, dt).unwrap();
        let k = mem.kernel();
        // half weight at lag 0; the truncated tail oscillates as 1/(Λ T)
        let s: f64 = dt * (0.5 * k[0] + k[1..].iter().sum::<f64>());
        assert!((s / GAMMA0 - 1.0).abs() < 1e-3, "{}", s / GAMMA0);
    }

    #[test]
    fn rejects_short_window() {
        let spec = KernelSpec::hard(10.0);
        assert!(matches!(MemoryBuffer::new(&spec, 1.0, 0.01), Err(Error::MemoryUnderrun { .. })));
    }
}
