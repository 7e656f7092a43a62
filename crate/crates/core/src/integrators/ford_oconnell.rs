//! Order-reduced equation `m ẍ = (1 + τ_m d/dt)[F(x) − e ξ̇]`, with
//! `dF/dt = J(x) ẋ` from the potential Hessian.

use super::consistent::{pack, unpack};
use super::rk4::{rk4_step, Stage};
use super::{LedgerIncrement, StepNoise};
use crate::error::Result;
use crate::forces::ForceField;
use crate::model::SystemState;
use crate::units::{tau_m, UnitSystem};

pub fn step_ford_oconnell(
    state: &SystemState,
    ff: &ForceField,
    noise: &StepNoise,
    dt: f64,
) -> Result<(SystemState, LedgerIncrement)> {
    let s = &ff.particles[0];
    let (m, e) = (s.mass, s.charge);
    let tau = tau_m(s, &UnitSystem::default());
    let mut y = vec![0.0; 8];
    pack(&state.positions[..1], &mut y, 0);
    pack(&[state.momenta[0] / m], &mut y, 3);
    rk4_step(&mut y, dt, |stage, y, dy| {
        let ns = match stage {
            Stage::Start => &noise.start,
            Stage::Mid => &noise.mid,
            Stage::End => &noise.end,
        };
        let (dxi, ddxi) = (ns.dxi[0], ns.ddxi[0]);
        let x = unpack(y, 0, 1)[0];
        let v = unpack(y, 3, 1)[0];
        let f = ff.external_force_one(0, &x);
        let jv = ff.external_jacobian_one(0, &x) * v;
        let acc = (f + jv * tau - dxi * e - ddxi * (tau * e)) / m;
        pack(&[v, acc], dy, 0);
        dy[6] = tau * v.dot(&jv);
        dy[7] = -e * v.dot(&(dxi + ddxi * tau));
        Ok(())
    })?;
    let next = SystemState {
        time: state.time + dt,
        positions: unpack(&y, 0, 1),
        momenta: vec![unpack(&y, 3, 1)[0] * m],
        aux: None,
    };
    Ok((next, LedgerIncrement { d_gamma: y[6], d_xi: y[7] }))
}
