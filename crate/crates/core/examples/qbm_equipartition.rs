//! Thermal QBM oscillator relaxing to equipartition.

use emlangevin::demo::thermal_qbm;
use emlangevin::diagnostics::{equipartition_check, mean_stderr};
use emlangevin::integrators::run_ensemble;

fn main() -> emlangevin::Result<()> {
    let s = thermal_qbm(8, 4000.0);
    let outs = run_ensemble(&s)?;
    let ratios: Vec<f64> = outs.iter().map(|o| equipartition_check(&o.trajectory, &s)).collect::<Result<_, _>>()?;
    for (r, x) in ratios.iter().enumerate() {
        println!("replica {r}: <x^2> m w0^2 / kT = {x:.4}");
    }
    let (mean, se) = mean_stderr(&ratios);
    println!("ensemble: {mean:.4} +- {se:.4}");
    Ok(())
}
