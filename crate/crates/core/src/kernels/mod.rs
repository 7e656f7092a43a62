//! Damping and dissipation kernels of the transverse electromagnetic field.
//!
//! The frequency-domain kernels are closed form. Time-domain kernels are the
//! regulated inverse cosine transform evaluated by composite Gauss–Legendre
//! quadrature on the frequency axis; [`oracle::oracle_kernel_quadrature`]
//! evaluates the same object from the raw mode sum and is kept as an
//! independent check.

pub mod oracle;
pub mod quadrature;
pub mod special;

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{GAMMA0, SPEED_OF_LIGHT};
use crate::{Mat3, Vec3};

pub use oracle::{oracle_kernel_quadrature, OracleEstimate, OracleOptions};
pub use special::{s0_tilde, s1_tilde, sinc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regulator {
    /// Sharp mode cutoff; reproduces `δ_Λ(t) = sin(Λt)/(πt)` at coincidence.
    #[default]
    Hard,
    Exponential,
    Gaussian,
}

impl Regulator {
    /// `χ(u)` for `u = |ω|/Λ ≥ 0`.
    pub fn chi(self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            Regulator::Hard => {
                if u <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Regulator::Exponential => (-u).exp(),
            Regulator::Gaussian => (-u * u).exp(),
        }
    }

    /// Point beyond which `χ` is below 1e-18 (exactly zero for `Hard`).
    pub fn support(self) -> f64 {
        match self {
            Regulator::Hard => 1.0,
            Regulator::Exponential => 42.0,
            Regulator::Gaussian => 6.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub cutoff_lambda: f64,
    #[serde(default)]
    pub regulator: Regulator,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { cutoff_lambda: 100.0, regulator: Regulator::Hard }
    }
}

impl KernelSpec {
    pub fn new(cutoff_lambda: f64, regulator: Regulator) -> Result<Self> {
        let spec = KernelSpec { cutoff_lambda, regulator };
        let mut errors = Vec::new();
        spec.validate(&mut errors);
        if errors.is_empty() {
            Ok(spec)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn hard(cutoff_lambda: f64) -> Self {
        KernelSpec { cutoff_lambda, regulator: Regulator::Hard }
    }

    pub(crate) fn validate(&self, errors: &mut Vec<String>) {
        if !(self.cutoff_lambda.is_finite() && self.cutoff_lambda > 0.0) {
            errors.push(format!("kernel.cutoff_lambda must be finite and > 0, got {}", self.cutoff_lambda));
        }
    }

    pub fn gamma0(&self) -> f64 {
        GAMMA0
    }

    pub fn chi(&self, omega: f64) -> f64 {
        self.regulator.chi(omega / self.cutoff_lambda)
    }

    /// Upper end of the frequency integrals.
    pub fn omega_max(&self) -> f64 {
        self.cutoff_lambda * self.regulator.support()
    }

    /// Scalar dipole-limit damping `2γ₀ χ(|ω|/Λ)`.
    pub fn local_gamma_freq(&self, omega: f64) -> f64 {
        2.0 * GAMMA0 * self.chi(omega)
    }

    /// Closed-form coincident (`r = 0`) time kernel `γ(t)`.
    pub fn local_gamma_time(&self, t: f64) -> f64 {
        let l = self.cutoff_lambda;
        let pref = 2.0 * GAMMA0 / PI;
        match self.regulator {
            Regulator::Hard => pref * l * sinc(l * t),
            Regulator::Exponential => pref * l / (1.0 + (l * t) * (l * t)),
            Regulator::Gaussian => pref * l * 0.5 * PI.sqrt() * (-(l * t) * (l * t) / 4.0).exp(),
        }
    }

    /// `γ(0)` at coincidence; `(2/π) γ₀ Λ` for the hard regulator.
    pub fn local_gamma_at_zero(&self) -> f64 {
        self.local_gamma_time(0.0)
    }
}

fn unit_and_norm(r: &Vec3) -> (f64, Vec3) {
    let n = r.norm();
    if n > 0.0 {
        (n, r / n)
    } else {
        (0.0, Vec3::zeros())
    }
}

fn assemble(rhat: &Vec3, iso: f64, aniso: f64) -> Mat3 {
    Mat3::identity() * iso + rhat * rhat.transpose() * aniso
}

/// `γ̃_A[r; ω] = 2γ₀ χ(|ω|/Λ) [S̃₁(|rω|/c) I + S̃₀(|rω|/c) r̂r̂ᵀ]`.
///
/// At `r = 0` the direction is undefined and only the isotropic part is
/// returned, which is exact because `S̃₀(0) = 0`.
pub fn gamma_freq(r: &Vec3, omega: f64, spec: &KernelSpec) -> Mat3 {
    let g = 2.0 * GAMMA0 * spec.chi(omega);
    let (rn, rhat) = unit_and_norm(r);
    if rn == 0.0 {
        return Mat3::identity() * g;
    }
    let z = rn * omega.abs() / SPEED_OF_LIGHT;
    assemble(&rhat, g * s1_tilde(z), g * s0_tilde(z))
}

/// Electric-dipole (π-coupling) damping `ω² γ̃_A`.
pub fn gamma_pi_freq(r: &Vec3, omega: f64, spec: &KernelSpec) -> Mat3 {
    gamma_freq(r, omega, spec) * (omega * omega)
}

/// Dissipation kernel `μ̃ = iω γ̃`.
pub fn mu_freq(r: &Vec3, omega: f64, spec: &KernelSpec) -> Matrix3<Complex64> {
    gamma_freq(r, omega, spec).map(|g| Complex64::new(0.0, omega * g))
}

/// Zero-time-lag kernel `γ_A[r; 0] = (3/4) c γ₀ (I + r̂r̂ᵀ)/|r|`, the Darwin
/// magnetostatic coupling.
pub fn gamma_coincident(r: &Vec3) -> Result<Mat3> {
    let (rn, rhat) = unit_and_norm(r);
    if rn == 0.0 || !rn.is_finite() {
        return Err(Error::ZeroSeparation);
    }
    let c = 0.75 * SPEED_OF_LIGHT * GAMMA0 / rn;
    Ok(assemble(&rhat, c, c))
}

/// Scalar time-domain profiles per unit `2γ₀`: `γ(r;t) = 2γ₀[s1(t) I + s0(t) r̂r̂ᵀ]`,
/// plus the matching profiles of `μ(r;t) = ∂γ/∂t`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimeProfile {
    pub s1: f64,
    pub s0: f64,
    pub ds1: f64,
    pub ds0: f64,
}

/// Inverse cosine/sine transforms of `χ S̃₁(|r|ω)` and `χ S̃₀(|r|ω)`.
///
/// `s(t) = (1/π) ∫₀^∞ χ S̃(|r|ω) cos(ωt) dω` and
/// `ds(t) = −(1/π) ∫₀^∞ ω χ S̃(|r|ω) sin(ωt) dω`.
pub fn time_profiles(r_norm: f64, ts: &[f64], spec: &KernelSpec) -> Vec<TimeProfile> {
    if ts.is_empty() {
        return Vec::new();
    }
    let t_abs_max = ts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let omega_max = spec.omega_max();
    let rate = r_norm / SPEED_OF_LIGHT + t_abs_max;
    // phase per panel at most 2 rad; smooth regulators resolved at Λ/2
    let mut h = 2.0 / rate.max(1e-300);
    h = h.min(omega_max / 4.0);
    if spec.regulator != Regulator::Hard {
        h = h.min(spec.cutoff_lambda / 2.0);
    }
    let panels = (omega_max / h).ceil() as usize;
    let (nodes, weights) = quadrature::composite_nodes(0.0, omega_max, panels);

    let f: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&weights)
        .map(|(&w, &q)| {
            let c = q * spec.chi(w) / PI;
            if r_norm == 0.0 {
                (c, 0.0)
            } else {
                let z = r_norm * w / SPEED_OF_LIGHT;
                (c * s1_tilde(z), c * s0_tilde(z))
            }
        })
        .collect();

    let mut out = vec![TimeProfile::default(); ts.len()];
    match uniform_spacing(ts) {
        Some(dt) if ts.len() > 2 => {
            // phase rotation recurrence along the uniform grid
            let t0 = ts[0];
            for (&w, &(a1, a0)) in nodes.iter().zip(&f) {
                let mut z = Complex64::from_polar(1.0, w * t0);
                let rot = Complex64::from_polar(1.0, w * dt);
                for (k, o) in out.iter_mut().enumerate() {
                    if k % 256 == 0 {
                        z = Complex64::from_polar(1.0, w * (t0 + k as f64 * dt));
                    }
                    o.s1 += a1 * z.re;
                    o.s0 += a0 * z.re;
                    o.ds1 -= w * a1 * z.im;
                    o.ds0 -= w * a0 * z.im;
                    z *= rot;
                }
            }
        }
        _ => {
            for (o, &t) in out.iter_mut().zip(ts) {
                for (&w, &(a1, a0)) in nodes.iter().zip(&f) {
                    let (s, c) = (w * t).sin_cos();
                    o.s1 += a1 * c;
                    o.s0 += a0 * c;
                    o.ds1 -= w * a1 * s;
                    o.ds0 -= w * a0 * s;
                }
            }
        }
    }
    out
}

fn uniform_spacing(ts: &[f64]) -> Option<f64> {
    if ts.len() < 2 {
        return None;
    }
    let dt = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    if !(dt > 0.0) {
        return None;
    }
    let uniform = ts
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    uniform.then_some(dt)
}

fn check_grid(ts: &[f64], spec: &KernelSpec) -> Result<()> {
    if ts.len() < 2 {
        return Ok(());
    }
    let dt = uniform_spacing(ts).ok_or(Error::NonUniformGrid)?;
    if spec.cutoff_lambda * dt >= PI {
        return Err(Error::Aliasing { cutoff: spec.cutoff_lambda, spacing: dt });
    }
    Ok(())
}

/// Regulated time-domain damping kernel `γ_A[r; t]` sampled on a uniform grid.
pub fn gamma_time(r: &Vec3, t_grid: &[f64], spec: &KernelSpec) -> Result<Vec<Mat3>> {
    check_grid(t_grid, spec)?;
    let (rn, rhat) = unit_and_norm(r);
    let g = 2.0 * GAMMA0;
    Ok(time_profiles(rn, t_grid, spec)
        .into_iter()
        .map(|p| assemble(&rhat, g * p.s1, g * p.s0))
        .collect())
}

/// `γ_A[r; t]` at a single lag.
pub fn gamma_time_at(r: &Vec3, t: f64, spec: &KernelSpec) -> Mat3 {
    let (rn, rhat) = unit_and_norm(r);
    let p = time_profiles(rn, &[t], spec)[0];
    assemble(&rhat, 2.0 * GAMMA0 * p.s1, 2.0 * GAMMA0 * p.s0)
}

/// Time-domain dissipation kernel, the inverse transform of `iω γ̃`.
pub fn mu_time(r: &Vec3, t_grid: &[f64], spec: &KernelSpec) -> Result<Vec<Mat3>> {
    check_grid(t_grid, spec)?;
    let (rn, rhat) = unit_and_norm(r);
    let g = 2.0 * GAMMA0;
    Ok(time_profiles(rn, t_grid, spec)
        .into_iter()
        .map(|p| assemble(&rhat, g * p.ds1, g * p.ds0))
        .collect())
}

/// Symmetric uniform grid `[-t_max, t_max]` with `n` points.
pub fn symmetric_grid(t_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let dt = 2.0 * t_max / (n - 1) as f64;
    (0..n).map(|k| -t_max + k as f64 * dt).collect()
}
