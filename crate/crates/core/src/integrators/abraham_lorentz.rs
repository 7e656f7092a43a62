//! Point-limit Abraham-Lorentz-Langevin equation
//! `m ẍ = F(x) + 2e²γ₀ x⃛ − e ξ̇`, integrated in `(x, v, a)` so that the
//! runaway root `s = 1/τ_m` is kept.

use super::consistent::{pack, unpack};
use super::rk4::{rk4_step, Stage};
use super::{LedgerIncrement, StepNoise};
use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::model::SystemState;
use crate::units::{tau_m, UnitSystem};

/// `ȧ = (a − F/m + (e/m) ξ̇) / τ_m`.
pub fn step_abraham_lorentz(
    state: &SystemState,
    ff: &ForceField,
    noise: &StepNoise,
    dt: f64,
) -> Result<(SystemState, LedgerIncrement)> {
    let s = &ff.particles[0];
    let (m, e) = (s.mass, s.charge);
    let tau = tau_m(s, &UnitSystem::default());
    let acc = state.aux.as_ref().ok_or_else(|| Error::Missing("acceleration state for abraham_lorentz".into()))?;
    let mut y = vec![0.0; 11];
    pack(&state.positions[..1], &mut y, 0);
    pack(&[state.momenta[0] / m], &mut y, 3);
    pack(&acc[..1], &mut y, 6);
    rk4_step(&mut y, dt, |stage, y, dy| {
        let dxi = match stage {
            Stage::Start => noise.start.dxi[0],
            Stage::Mid => noise.mid.dxi[0],
            Stage::End => noise.end.dxi[0],
        };
        let x = unpack(y, 0, 1)[0];
        let v = unpack(y, 3, 1)[0];
        let a = unpack(y, 6, 1)[0];
        let f = ff.external_force_one(0, &x);
        let jerk = (a - f / m + dxi * (e / m)) / tau;
        pack(&[v, a, jerk], dy, 0);
        // dH/dt = v·(m a − F) = m τ v·ȧ − e v·ξ̇
        dy[9] = m * tau * v.dot(&jerk);
        dy[10] = -e * v.dot(&dxi);
        Ok(())
    })?;
    let next = SystemState {
        time: state.time + dt,
        positions: unpack(&y, 0, 1),
        momenta: vec![unpack(&y, 3, 1)[0] * m],
        aux: Some(unpack(&y, 6, 1)),
    };
    Ok((next, LedgerIncrement { d_gamma: y[9], d_xi: y[10] }))
}
