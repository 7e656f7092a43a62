//! Harmonic well: the consistent equations damp exactly like the
//! Ford-O'Connell equation, at rate tau_m w0^2 / 2.

use emlangevin::demo::harmonic_well;
use emlangevin::diagnostics::fit_growth_rate;
use emlangevin::integrators::run;
use emlangevin::scenario::EquationFamily;

fn main() -> emlangevin::Result<()> {
    for tau in [1e-3, 1e-2] {
        let mut c = harmonic_well(EquationFamily::Consistent1OverC3, tau, 0.05, 4.0 / tau);
        c.record_stride = 20;
        let mut f = c.clone();
        f.equation_family = EquationFamily::FordOConnell;
        // Ford-O'Connell takes the mechanical velocity, which differs from p/m
        f.initial.momenta = vec![[-tau, 0.0, 0.0]];
        let a = run(&c)?;
        let b = run(&f)?;
        let dev = a
            .trajectory
            .samples
            .iter()
            .zip(&b.trajectory.samples)
            .map(|(p, q)| (p.state.positions[0] - q.state.positions[0]).norm())
            .fold(0.0, f64::max);
        let rate = -fit_growth_rate(&a.ledger.h_sys, c.dt * c.record_stride as f64)?.rate / 2.0;
        println!("tau_m = {tau:.0e}: amplitude decay rate / (tau_m/2) = {:.5}, max |x_c - x_fo| = {dev:.2e}", rate / (tau / 2.0));
    }
    Ok(())
}
