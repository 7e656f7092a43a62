//! Synthesizes thermal noise and checks its spectrum against the
//! fluctuation-dissipation target, classical and quantum.

use emlangevin::kernels::KernelSpec;
use emlangevin::noise::psd::estimate_psd;
use emlangevin::noise::{fdr_spectrum, synthesize_samples, NoiseSpec};

fn main() -> emlangevin::Result<()> {
    let lam = 10.0;
    let dt = 0.05;
    let kernel = KernelSpec::hard(lam);
    for spec in [NoiseSpec::classical(1.0, kernel), NoiseSpec::quantum(1.0, 0.2, kernel)] {
        let r = synthesize_samples(&spec, 1, 1 << 18, dt, 7)?;
        let est = estimate_psd(&r.xi[0][0], dt, 63)?;
        println!("hbar = {}, kT = {}", spec.hbar, spec.kb_t);
        println!("{:>8} {:>12} {:>12} {:>8}", "omega", "target", "estimate", "ratio");
        for w in [0.2, 1.0, 2.0, 4.0, 6.0, 8.0] {
            let band = est.band(w - 0.1, w + 0.1);
            let n = band.len() as f64;
            let e: f64 = band.clone().map(|k| est.psd[k]).sum::<f64>() / n;
            let t: f64 = band.map(|k| fdr_spectrum(est.omega[k], &spec)).sum::<f64>() / n;
            println!("{w:8.2} {t:12.5e} {e:12.5e} {:8.4}", e / t);
        }
        println!();
    }
    Ok(())
}
