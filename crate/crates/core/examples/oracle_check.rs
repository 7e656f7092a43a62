//! Closed-form kernel against a brute-force sum over field modes and
//! polarizations.

use std::time::Instant;

use emlangevin::kernels::{gamma_time_at, oracle_kernel_quadrature, KernelSpec};
use emlangevin::Vec3;

fn main() -> emlangevin::Result<()> {
    let lam = 20.0;
    let spec = KernelSpec::hard(lam);
    for (r, t) in [(0.0, 0.1), (1.0, 0.0), (1.0, 0.7), (1.0, 1.0), (2.0, 1.5)] {
        let rv = Vec3::new(0.0, 0.6, 0.8) * r;
        let start = Instant::now();
        let oracle = oracle_kernel_quadrature(&rv, t, lam)?;
        let closed = gamma_time_at(&rv, t, &spec);
        let rel = (closed - oracle.value).norm() / oracle.value.norm();
        println!(
            "r = {r:.1}, t = {t:.1}: relative difference {rel:.2e}, oracle error estimate {:.1e} ({:.2} s)",
            oracle.error_estimate / oracle.value.norm(),
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
