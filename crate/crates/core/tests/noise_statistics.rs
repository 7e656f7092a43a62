use emlangevin::kernels::KernelSpec;
use emlangevin::noise::psd::estimate_psd;
use emlangevin::noise::{fdr_spectrum, synthesize_samples, NoiseSpec};

const LAMBDA: f64 = 10.0;

fn moments(v: &[f64]) -> (f64, f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (mean, var, m4 / (var * var) - 3.0)
}

/// Relative error and its standard error of the band-averaged estimate/target
/// ratio, for four equal bands over the mid band.
fn fdr_band_errors(spec: &NoiseSpec, seed: u64) -> Vec<(f64, f64)> {
    let dt = 0.5 / LAMBDA;
    let r = synthesize_samples(spec, 1, 1 << 20, dt, seed).unwrap();
    let ests: Vec<_> = (0..3).map(|c| estimate_psd(&r.xi[0][c], dt, 255).unwrap()).collect();
    let (lo, hi) = (LAMBDA / 100.0, LAMBDA / 2.0);
    let width = (hi - lo) / 4.0;
    (0..4)
        .map(|b| {
            let range = ests[0].band(lo + b as f64 * width, lo + (b + 1) as f64 * width);
            let mut ratio = 0.0;
            let mut var = 0.0;
            let mut count = 0.0;
            for e in &ests {
                for k in range.clone() {
                    let target = fdr_spectrum(e.omega[k], spec);
                    ratio += e.psd[k] / target;
                    var += (e.stderr[k] / target).powi(2);
                    count += 1.0;
                }
            }
            (ratio / count - 1.0, var.sqrt() / count)
        })
        .collect()
}

#[test]
fn welch_estimate_closes_fdr_loop() {
    let kernel = KernelSpec::hard(LAMBDA);
    let mut seed = 11;
    for kb_t in [0.1, 1.0, 10.0] {
        for spec in [NoiseSpec::classical(kb_t, kernel), NoiseSpec::quantum(1.0, kb_t, kernel)] {
            seed += 1;
            for (err, se) in fdr_band_errors(&spec, seed) {
                assert!(err.abs() < 0.05, "kT={kb_t} hbar={}: {err} (se {se})", spec.hbar);
                // also consistent with sampling error alone
                assert!(err.abs() < 4.0 * se + 5e-3, "kT={kb_t}: {err} vs se {se}");
            }
        }
    }
}

#[test]
fn samples_are_gaussian_with_zero_mean() {
    let spec = NoiseSpec::classical(2.0, KernelSpec::hard(LAMBDA));
    let r = synthesize_samples(&spec, 1, 1 << 20, 0.05, 3).unwrap();
    for c in 0..3 {
        let (mean, var, kurt) = moments(&r.xi[0][c]);
        assert!(kurt.abs() < 0.05, "excess kurtosis {kurt}");
        // band-limited samples are correlated over ~π/Λ, i.e. about 6 samples
        let n_eff = r.len as f64 / 6.0;
        assert!(mean.abs() < 5.0 * (var / n_eff).sqrt(), "mean {mean}");
    }
}

#[test]
fn components_and_particles_are_independent() {
    let dt = 0.9 * std::f64::consts::PI / LAMBDA;
    let spec = NoiseSpec::classical(1.0, KernelSpec::hard(LAMBDA));
    let len = 1 << 18;
    let r = synthesize_samples(&spec, 2, len, dt, 5).unwrap();
    let series: Vec<&Vec<f64>> = r.xi.iter().flat_map(|p| p.iter()).collect();
    let norm: Vec<f64> = series.iter().map(|s| moments(s).1.sqrt()).collect();
    let bound = 5.0 / (len as f64).sqrt();
    for i in 0..series.len() {
        for j in (i + 1)..series.len() {
            for lag in -10i64..=10 {
                let (a, b) = (series[i], series[j]);
                let mut acc = 0.0;
                let mut n = 0.0;
                for k in 10..(len - 10) {
                    acc += a[k] * b[(k as i64 + lag) as usize];
                    n += 1.0;
                }
                let rho = acc / n / (norm[i] * norm[j]);
                assert!(rho.abs() < bound, "({i},{j}) lag {lag}: {rho}");
            }
        }
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let dt = 0.2 / LAMBDA;
    let spec = NoiseSpec::classical(1.0, KernelSpec::hard(LAMBDA));
    let r = synthesize_samples(&spec, 1, 1 << 16, dt, 9).unwrap();
    for (x, d) in [(&r.xi[0][0], &r.dxi[0][0]), (&r.dxi[0][1], &r.ddxi[0][1])] {
        let mut err = 0.0;
        let mut norm = 0.0;
        for k in 1..x.len() - 1 {
            let fd = (x[k + 1] - x[k - 1]) / (2.0 * dt);
            err += (fd - d[k]).powi(2);
            norm += d[k] * d[k];
        }
        let rel = (err / norm).sqrt();
        assert!(rel < 0.02, "relative rms {rel}");
    }
}
