use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

/// Welch estimate of a two-sided power spectral density.
///
/// Normalized so that `(1/2π) ∫ S(ω) dω` over all ω equals the variance; a
/// white sequence of variance σ² at spacing dt has `S = σ² dt`.
#[derive(Debug, Clone, Serialize)]
pub struct PsdEstimate {
    pub omega: Vec<f64>,
    pub psd: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_segments: usize,
    pub segment_len: usize,
}

impl PsdEstimate {
    /// One-sided density on `ω ≥ 0` (interior bins doubled).
    pub fn one_sided(&self) -> Vec<f64> {
        let last = self.psd.len() - 1;
        self.psd
            .iter()
            .enumerate()
            .map(|(k, &p)| if k == 0 || (k == last && self.segment_len.is_multiple_of(2)) { p } else { 2.0 * p })
            .collect()
    }

    /// Indices with `lo ≤ ω ≤ hi`.
    pub fn band(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.omega.partition_point(|&w| w < lo);
        let b = self.omega.partition_point(|&w| w <= hi);
        a..b
    }
}

pub const MIN_SEGMENTS: usize = 8;
pub const MIN_LEN: usize = 1 << 12;

/// Averaged periodogram with a periodic Hann window and 50% overlap.
pub fn estimate_psd(series: &[f64], dt: f64, n_segments: usize) -> Result<PsdEstimate> {
    if n_segments < MIN_SEGMENTS {
        return Err(Error::InvalidInput(format!("n_segments must be >= {MIN_SEGMENTS}, got {n_segments}")));
    }
    if series.len() < MIN_LEN {
        return Err(Error::SeriesTooShort { len: series.len(), min: MIN_LEN });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be finite and > 0, got {dt}")));
    }
    let n = series.len();
    let seg = 2 * n / (n_segments + 1);
    let hop = seg / 2;
    if seg < 16 {
        return Err(Error::SeriesTooShort { len: n, min: 8 * (n_segments + 1) });
    }
    let window: Vec<f64> = (0..seg).map(|j| 0.5 * (1.0 - (2.0 * PI * j as f64 / seg as f64).cos())).collect();
    let norm = dt / window.iter().map(|w| w * w).sum::<f64>();
    let bins = seg / 2 + 1;
    let fft = FftPlanner::new().plan_fft_forward(seg);

    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); seg];
    for s in 0..n_segments {
        let start = s * hop;
        for (j, b) in buf.iter_mut().enumerate() {
            *b = Complex64::new(series[start + j] * window[j], 0.0);
        }
        fft.process(&mut buf);
        for k in 0..bins {
            let p = norm * buf[k].norm_sqr();
            sum[k] += p;
            sum_sq[k] += p * p;
        }
    }
    let kf = n_segments as f64;
    let psd: Vec<f64> = sum.iter().map(|s| s / kf).collect();
    let stderr = sum_sq
        .iter()
        .zip(&psd)
        .map(|(sq, m)| ((sq / kf - m * m).max(0.0) * kf / (kf - 1.0)).sqrt() / kf.sqrt())
        .collect();
    let omega = (0..bins).map(|k| 2.0 * PI * k as f64 / (seg as f64 * dt)).collect();
    Ok(PsdEstimate { omega, psd, stderr, n_segments, segment_len: seg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn white_noise_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dt = 0.25;
        let x: Vec<f64> = (0..1 << 22).map(|_| StandardNormal.sample(&mut rng)).collect();
        let est = estimate_psd(&x, dt, 4095).unwrap();
        let one = est.one_sided();
        let n = est.psd.len();
        for (k, (s, o)) in est.psd.iter().zip(&one).enumerate().take(n - 1).skip(1) {
            assert!((s / dt - 1.0).abs() < 0.10, "bin {k}: {}", s / dt);
            assert!((o / (2.0 * dt) - 1.0).abs() < 0.10);
        }
        let mean = est.psd[1..est.psd.len() - 1].iter().sum::<f64>() / (est.psd.len() - 2) as f64;
        assert!((mean / dt - 1.0).abs() < 0.005);
    }

    #[test]
    fn sinusoid_concentrates_in_one_line() {
        let dt = 0.01;
        let n = 1 << 16;
        let est0 = estimate_psd(&vec![0.0; n], dt, 15).unwrap();
        let w0 = est0.omega[200];
        let x: Vec<f64> = (0..n).map(|j| (w0 * j as f64 * dt).sin()).collect();
        let est = estimate_psd(&x, dt, 15).unwrap();
        let total: f64 = est.psd.iter().sum();
        let (peak, _) = est.psd.iter().enumerate().fold((0, 0.0), |b, (k, &p)| if p > b.1 { (k, p) } else { b });
        assert_eq!(peak, 200);
        let line: f64 = est.psd[peak - 1..=peak + 1].iter().sum();
        assert!(line / total >= 0.9, "{}", line / total);
        // total power: (1/π) Σ S Δω = ½
        let dw = est.omega[1];
        assert!((2.0 * total * dw / (2.0 * PI) - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_short_and_undersegmented_series() {
        assert!(matches!(estimate_psd(&[0.0; 100], 0.1, 8), Err(Error::SeriesTooShort { .. })));
        assert!(estimate_psd(&vec![0.0; 8192], 0.1, 4).is_err());
    }
}
