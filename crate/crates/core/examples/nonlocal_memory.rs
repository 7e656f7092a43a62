//! QBM with the full memory kernel approaching the local Ohmic limit as the
//! cutoff grows.

use emlangevin::forces::ExternalPotential;
use emlangevin::integrators::run;
use emlangevin::scenario::{EquationFamily, QbmMode, Scenario};
use emlangevin::units::ParticleSpec;

fn main() -> emlangevin::Result<()> {
    let p = ParticleSpec::new("q", 1.0, 0.8)?;
    let mut base = Scenario::single(EquationFamily::Qbm, p, [1.0, 0.0, 0.0], [0.0; 3], 0.005, 20.0);
    base.external_potential = ExternalPotential::Harmonic { omega0: 1.0 };
    let local = run(&base)?;
    for lam in [25.0, 50.0, 100.0, 200.0] {
        let mut s = base.clone();
        s.qbm.mode = QbmMode::Nonlocal;
        s.qbm.memory_window = Some(10.0);
        s.kernel.cutoff_lambda = lam;
        let out = run(&s)?;
        let rms = (out
            .trajectory
            .samples
            .iter()
            .zip(&local.trajectory.samples)
            .map(|(a, b)| (a.state.positions[0] - b.state.positions[0]).norm_squared())
            .sum::<f64>()
            / out.trajectory.samples.len() as f64)
            .sqrt();
        println!("lambda = {lam:5.0}: rms distance to the Ohmic trajectory {rms:.3e}");
    }
    Ok(())
}
