//! A free charge with an initial acceleration: Abraham-Lorentz runs away at
//! rate 1/tau_m, the order-reduced and consistent equations do not.

use emlangevin::demo::runaway;
use emlangevin::diagnostics::fit_growth_rate;
use emlangevin::integrators::run;
use emlangevin::scenario::EquationFamily;
use emlangevin::units::tau_m;

fn main() -> emlangevin::Result<()> {
    let s = runaway();
    let tau = tau_m(&s.particles[0], &s.units);
    let out = run(&s)?;
    let a: Vec<f64> = out.trajectory.samples.iter().map(|x| x.state.aux.as_ref().unwrap()[0].norm()).collect();
    let fit = fit_growth_rate(&a, s.dt)?;
    println!("Abraham-Lorentz: {:?}, fitted |a| growth rate x tau_m = {:.5}", out.trajectory.status, fit.rate * tau);

    for fam in [EquationFamily::FordOConnell, EquationFamily::Consistent1OverC3] {
        let mut t = s.clone();
        t.equation_family = fam;
        t.initial.accelerations = None;
        t.dt = 0.1 * tau;
        t.t_end = 1e3 * tau;
        let o = run(&t)?;
        let last = o.trajectory.samples.last().unwrap();
        println!("{fam:?}: {:?} after {:.0} tau_m, |p| = {:.3}", o.trajectory.status, t.t_end / tau, last.state.momenta[0].norm());
    }
    Ok(())
}
