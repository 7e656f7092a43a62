//! Frequency and time profiles of the electromagnetic damping kernel for a
//! pair of points at separation `r`.

use emlangevin::kernels::{gamma_coincident, gamma_freq, gamma_time, s0_tilde, s1_tilde, symmetric_grid, KernelSpec};
use emlangevin::units::GAMMA0;
use emlangevin::Vec3;

fn main() -> emlangevin::Result<()> {
    let spec = KernelSpec::hard(50.0);
    let r = Vec3::new(1.0, 0.0, 0.0);

    println!("# frequency domain, entries in units of 2*gamma0");
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "omega", "S1", "S0", "par", "perp");
    for w in [0.0, 0.5, 1.0, 2.0, std::f64::consts::PI, 5.0, 10.0, 30.0] {
        let g = gamma_freq(&r, w, &spec) / (2.0 * GAMMA0);
        println!("{w:8.3} {:12.6} {:12.6} {:12.6} {:12.6}", s1_tilde(w), s0_tilde(w), g[(0, 0)], g[(1, 1)]);
    }

    // the cross kernel lives on the light cone |t| = |r|
    println!("\n# time domain");
    let ts = symmetric_grid(3.0, 601);
    let g = gamma_time(&r, &ts, &spec)?;
    for k in (300..601).step_by(15) {
        println!("t = {:6.3}  par {:+.6e}  perp {:+.6e}", ts[k], g[k][(0, 0)], g[k][(1, 1)]);
    }

    let c = gamma_coincident(&r)?;
    println!("\ninstantaneous kernel at t = 0: diag({:.6}, {:.6}, {:.6}) = (3/4) gamma0 (I + r r^T)/|r|", c[(0, 0)], c[(1, 1)], c[(2, 2)]);
    Ok(())
}
