//! Stationary Gaussian noise obeying the fluctuation–dissipation relation.
//!
//! Realizations are drawn by circulant embedding: a Hermitian random spectrum
//! with variance set by the target PSD is inverse transformed on a padded
//! periodic grid and the middle of the period is kept. The first and second
//! derivatives come from the same draw, weighted by `iω` and `−ω²`.

pub mod psd;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::Vec3;

pub use psd::{estimate_psd, PsdEstimate};

/// Minimum realization length accepted by [`synthesize`].
pub const MIN_SAMPLES: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kb_t: f64,
    #[serde(default)]
    pub hbar: f64,
    #[serde(default)]
    pub kernel: KernelSpec,
}

impl NoiseSpec {
    pub fn classical(kb_t: f64, kernel: KernelSpec) -> Self {
        NoiseSpec { kb_t, hbar: 0.0, kernel }
    }

    pub fn quantum(hbar: f64, kb_t: f64, kernel: KernelSpec) -> Self {
        NoiseSpec { kb_t, hbar, kernel }
    }

    /// True when the spectrum vanishes identically (classical vacuum).
    pub fn is_silent(&self) -> bool {
        self.kb_t == 0.0 && self.hbar == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.kb_t.is_finite() && self.kb_t >= 0.0) {
            errors.push(format!("noise.kb_t must be finite and >= 0, got {}", self.kb_t));
        }
        if !(self.hbar.is_finite() && self.hbar >= 0.0) {
            errors.push(format!("noise.hbar must be finite and >= 0, got {}", self.hbar));
        }
        self.kernel.validate(&mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

/// Symmetric noise spectrum `ν̃(ω) = γ̃(ω) ħω coth(ħω / 2k_BT)` with the
/// dipole-limit damping `γ̃ = 2γ₀ χ(|ω|/Λ)`.
pub fn fdr_spectrum(omega: f64, spec: &NoiseSpec) -> f64 {
    let g = spec.kernel.local_gamma_freq(omega);
    let w = omega.abs();
    if spec.hbar == 0.0 {
        return 2.0 * spec.kb_t * g;
    }
    if spec.kb_t == 0.0 {
        return spec.hbar * w * g;
    }
    let x = spec.hbar * w / (2.0 * spec.kb_t);
    if x < 1e-6 {
        // x coth x = 1 + x²/3 + O(x⁴)
        2.0 * spec.kb_t * g * (1.0 + x * x / 3.0)
    } else {
        spec.hbar * w * g / x.tanh()
    }
}

/// Sampled noise for `n_particles` independent particles.
#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub dt: f64,
    pub seed: u64,
    pub len: usize,
    /// `xi[particle][component]`, and likewise for the derivatives.
    pub xi: Vec<[Vec<f64>; 3]>,
    pub dxi: Vec<[Vec<f64>; 3]>,
    pub ddxi: Vec<[Vec<f64>; 3]>,
}

impl NoiseRealization {
    pub fn zeros(n_particles: usize, len: usize, dt: f64, seed: u64) -> Self {
        let z = || std::array::from_fn(|_| vec![0.0; len]);
        NoiseRealization {
            dt,
            seed,
            len,
            xi: (0..n_particles).map(|_| z()).collect(),
            dxi: (0..n_particles).map(|_| z()).collect(),
            ddxi: (0..n_particles).map(|_| z()).collect(),
        }
    }

    pub fn n_particles(&self) -> usize {
        self.xi.len()
    }

    pub fn xi_at(&self, particle: usize, k: usize) -> Vec3 {
        pick(&self.xi[particle], k)
    }

    pub fn dxi_at(&self, particle: usize, k: usize) -> Vec3 {
        pick(&self.dxi[particle], k)
    }

    pub fn ddxi_at(&self, particle: usize, k: usize) -> Vec3 {
        pick(&self.ddxi[particle], k)
    }
}

fn pick(c: &[Vec<f64>; 3], k: usize) -> Vec3 {
    Vec3::new(c[0][k], c[1][k], c[2][k])
}

/// Stream index used for particle `p`, component `c`.
pub fn stream_id(particle: usize, component: usize) -> u64 {
    (particle * 3 + component) as u64
}

/// Draws `len` samples spaced by `dt` for each particle and Cartesian component.
///
/// Stream `(p, c)` uses `ChaCha8Rng::seed_from_u64(seed)` on stream
/// [`stream_id`]`(p, c)`, so adding particles never changes existing streams.
pub fn synthesize_samples(spec: &NoiseSpec, n_particles: usize, len: usize, dt: f64, seed: u64) -> Result<NoiseRealization> {
    spec.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput(format!("noise dt must be finite and > 0, got {dt}")));
    }
    if len < MIN_SAMPLES {
        return Err(Error::SeriesTooShort { len, min: MIN_SAMPLES });
    }
    if spec.kernel.cutoff_lambda * dt >= PI {
        return Err(Error::Aliasing { cutoff: spec.kernel.cutoff_lambda, spacing: dt });
    }
    if spec.is_silent() {
        return Ok(NoiseRealization::zeros(n_particles, len, dt, seed));
    }

    let m = ((len as f64 / 0.8).ceil() as usize).next_power_of_two();
    let offset = (m - len) / 2;
    let omega = |k: usize| {
        let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        2.0 * PI * kk / (m as f64 * dt)
    };
    let mut amp = Vec::with_capacity(m / 2 + 1);
    for k in 0..=m / 2 {
        let w = omega(k);
        let s = fdr_spectrum(w, spec);
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::NegativeSpectrum { omega: w, value: s });
        }
        amp.push((s / (m as f64 * dt)).sqrt());
    }

    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(m);
    let streams: Vec<[Vec<f64>; 3]> = (0..n_particles * 3)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let mut a = vec![Complex64::new(0.0, 0.0); m];
            for k in 0..=m / 2 {
                let g1: f64 = StandardNormal.sample(&mut rng);
                let g2: f64 = StandardNormal.sample(&mut rng);
                if k == 0 || k == m / 2 {
                    a[k] = Complex64::new(amp[k] * g1, 0.0);
                } else {
                    let c = Complex64::new(g1, g2) * (amp[k] * std::f64::consts::FRAC_1_SQRT_2);
                    a[k] = c;
                    a[m - k] = c.conj();
                }
            }
            let mut da: Vec<Complex64> = (0..m)
                .map(|k| if k == m / 2 { Complex64::new(0.0, 0.0) } else { a[k] * Complex64::new(0.0, omega(k)) })
                .collect();
            let mut dda: Vec<Complex64> = (0..m).map(|k| a[k] * -(omega(k) * omega(k))).collect();
            fft.process(&mut a);
            fft.process(&mut da);
            fft.process(&mut dda);
            let take = |v: &[Complex64]| v[offset..offset + len].iter().map(|c| c.re).collect::<Vec<f64>>();
            [take(&a), take(&da), take(&dda)]
        })
        .collect();

    let mut out = NoiseRealization::zeros(0, len, dt, seed);
    let mut it = streams.into_iter();
    for _ in 0..n_particles {
        let mut xs: [Vec<f64>; 3] = Default::default();
        let mut ds: [Vec<f64>; 3] = Default::default();
        let mut dds: [Vec<f64>; 3] = Default::default();
        for c in 0..3 {
            let [x, d, dd] = it.next().expect("stream count");
            xs[c] = x;
            ds[c] = d;
            dds[c] = dd;
        }
        out.xi.push(xs);
        out.dxi.push(ds);
        out.ddxi.push(dds);
    }
    Ok(out)
}

/// Realization covering `[0, duration]` at spacing `dt`.
pub fn synthesize(spec: &NoiseSpec, n_particles: usize, duration: f64, dt: f64, seed: u64) -> Result<NoiseRealization> {
    if !(duration.is_finite() && duration > 0.0 && dt > 0.0) {
        return Err(Error::InvalidInput(format!("noise duration {duration} and dt {dt} must be positive")));
    }
    let len = (duration / dt).round() as usize + 1;
    synthesize_samples(spec, n_particles, len, dt, seed)
}
