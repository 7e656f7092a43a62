//! Renormalized multiparticle Langevin system, accurate to O(1/c³).
//!
//! ```text
//! ṗ_i = F_i(x, p)                                with F = −∇_x(U + φ + V_D)
//! ẋ_i = v(p_i) − (e_i/m_i) ξ_i + 2 (e_i/m_i)² γ₀ ṗ_i + ∇_{p_i} V_D
//! ```
//!
//! `ṗ_i` on the right is the force itself, so the system is an explicit ODE.

use super::rk4::{rk4_step, Stage};
use super::{LedgerIncrement, StepNoise};
use crate::error::Result;
use crate::forces::ForceField;
use crate::model::SystemState;
use crate::units::GAMMA0;
use crate::Vec3;

/// Free-particle velocity; resummed to stay below `c = 1` when `relativistic`.
pub fn free_velocity(p: &Vec3, mass: f64, relativistic: bool) -> Vec3 {
    let u = p / mass;
    if relativistic {
        u / (1.0 + u.norm_squared()).sqrt()
    } else {
        u
    }
}

pub fn kinetic_energy(p: &Vec3, mass: f64, relativistic: bool) -> f64 {
    let u2 = p.norm_squared() / (mass * mass);
    if relativistic {
        // m(√(1+u²) − 1) without cancellation
        mass * u2 / ((1.0 + u2).sqrt() + 1.0)
    } else {
        0.5 * mass * u2
    }
}

pub fn system_energy(ff: &ForceField, x: &[Vec3], p: &[Vec3], relativistic: bool) -> Result<f64> {
    let k: f64 = p.iter().zip(&ff.particles).map(|(pi, s)| kinetic_energy(pi, s.mass, relativistic)).sum();
    Ok(k + ff.potential_energy(x, p)?)
}

pub(crate) fn unpack(y: &[f64], offset: usize, n: usize) -> Vec<Vec3> {
    (0..n).map(|i| Vec3::new(y[offset + 3 * i], y[offset + 3 * i + 1], y[offset + 3 * i + 2])).collect()
}

pub(crate) fn pack(v: &[Vec3], y: &mut [f64], offset: usize) {
    for (i, w) in v.iter().enumerate() {
        y[offset + 3 * i..offset + 3 * i + 3].copy_from_slice(w.as_slice());
    }
}

/// Coordinate velocities and force given the noise `xi` at the same time.
pub fn velocities(ff: &ForceField, x: &[Vec3], p: &[Vec3], xi: &[Vec3], relativistic: bool) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    let f = ff.total_force(x, p)?;
    let gp = if ff.darwin { Some(ff.darwin_grad_p(x, p)?) } else { None };
    let v = (0..x.len())
        .map(|i| {
            let s = &ff.particles[i];
            let a = s.charge_ratio();
            let mut v = free_velocity(&p[i], s.mass, relativistic) - xi[i] * a + f[i] * (2.0 * a * a * GAMMA0);
            if let Some(g) = &gp {
                v += g[i];
            }
            v
        })
        .collect();
    Ok((v, f))
}

fn rhs(ff: &ForceField, relativistic: bool, y: &[f64], xi: &[Vec3], dy: &mut [f64]) -> Result<()> {
    let n = ff.n();
    let x = unpack(y, 0, n);
    let p = unpack(y, 3 * n, n);
    let (v, f) = velocities(ff, &x, &p, xi, relativistic)?;
    pack(&v, dy, 0);
    pack(&f, dy, 3 * n);
    let (mut dg, mut dx) = (0.0, 0.0);
    for i in 0..n {
        let a = ff.particles[i].charge_ratio();
        dg -= 2.0 * a * a * GAMMA0 * f[i].norm_squared();
        dx += a * xi[i].dot(&f[i]);
    }
    dy[6 * n] = dg;
    dy[6 * n + 1] = dx;
    Ok(())
}

/// One RK4 step; the noise is read at the start, midpoint and end of the step.
pub fn step_consistent(
    state: &SystemState,
    ff: &ForceField,
    noise: &StepNoise,
    dt: f64,
    relativistic: bool,
) -> Result<(SystemState, LedgerIncrement)> {
    let n = state.n();
    let mut y = vec![0.0; 6 * n + 2];
    pack(&state.positions, &mut y, 0);
    pack(&state.momenta, &mut y, 3 * n);
    rk4_step(&mut y, dt, |stage, y, dy| {
        let xi = match stage {
            Stage::Start => &noise.start.xi,
            Stage::Mid => &noise.mid.xi,
            Stage::End => &noise.end.xi,
        };
        rhs(ff, relativistic, y, xi, dy)
    })?;
    let next = SystemState { time: state.time + dt, positions: unpack(&y, 0, n), momenta: unpack(&y, 3 * n, n), aux: None };
    Ok((next, LedgerIncrement { d_gamma: y[6 * n], d_xi: y[6 * n + 1] }))
}
