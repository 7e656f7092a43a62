//! Post-processing: mass renormalization curves, growth-rate fits, energy
//! audits and equipartition checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::RunOutput;
use crate::model::{EnergyLedger, Trajectory};
use crate::scenario::{EquationFamily, Scenario};
use crate::units::{tau_m, GAMMA0};

/// Zero-lag coincident damping kernel for the hard regulator, `(2/π) γ₀ Λ`.
pub fn gamma_at_zero(lambda: f64) -> f64 {
    2.0 / PI * GAMMA0 * lambda
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormScheme {
    /// `m_ren = m_bare + 2e²γ(0)`.
    StandardAl,
    /// `1/m_ren = 1/m_bare + 2e²γ(0)/m_bare²`.
    ConsistentMagnetostatic,
}

/// Bare mass for the additive scheme; negative beyond the critical cutoff.
pub fn mass_renorm_standard(m_ren: f64, lambda: f64, e: f64) -> f64 {
    m_ren - 2.0 * e * e * gamma_at_zero(lambda)
}

/// Positive root of `m_b² − m_ren m_b − 2e²γ(0) m_ren = 0`.
pub fn mass_renorm_consistent(m_ren: f64, lambda: f64, e: f64) -> f64 {
    let g = 2.0 * e * e * gamma_at_zero(lambda);
    let root = 0.5 * (m_ren + (m_ren * m_ren + 4.0 * g * m_ren).sqrt());
    assert!(root > 0.0, "bare mass root must be positive");
    root
}

/// Inverse direction of [`mass_renorm_standard`].
pub fn renormalized_mass_standard(m_bare: f64, lambda: f64, e: f64) -> f64 {
    m_bare + 2.0 * e * e * gamma_at_zero(lambda)
}

/// Inverse direction of [`mass_renorm_consistent`]: `m_b² / (m_b + 2e²γ(0))`.
pub fn renormalized_mass_consistent(m_bare: f64, lambda: f64, e: f64) -> f64 {
    m_bare * m_bare / (m_bare + 2.0 * e * e * gamma_at_zero(lambda))
}

/// Analytic zero of the additive scheme, `π m_ren / (4 e² γ₀)`.
pub fn critical_cutoff(m_ren: f64, e: f64) -> f64 {
    PI * m_ren / (4.0 * e * e * GAMMA0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormCurve {
    pub scheme: RenormScheme,
    pub m_ren: f64,
    pub charge: f64,
    pub lambdas: Vec<f64>,
    pub m_bare: Vec<f64>,
    /// Cutoff where `m_bare` changes sign, refined between grid points.
    pub lambda_star: Option<f64>,
}

impl RenormCurve {
    pub fn compute(scheme: RenormScheme, m_ren: f64, e: f64, lambdas: &[f64]) -> Result<Self> {
        if !(m_ren.is_finite() && m_ren > 0.0) || !e.is_finite() {
            return Err(Error::InvalidInput(format!("m_ren must be > 0 and e finite (got {m_ren}, {e})")));
        }
        if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidInput("cutoff grid must be finite and > 0".into()));
        }
        let f = |l: f64| match scheme {
            RenormScheme::StandardAl => mass_renorm_standard(m_ren, l, e),
            RenormScheme::ConsistentMagnetostatic => mass_renorm_consistent(m_ren, l, e),
        };
        let m_bare: Vec<f64> = lambdas.iter().map(|&l| f(l)).collect();
        let lambda_star = lambdas
            .windows(2)
            .zip(m_bare.windows(2))
            .find(|(_, m)| m[0] > 0.0 && m[1] <= 0.0)
            .map(|(l, _)| bisect(f, l[0], l[1]));
        Ok(RenormCurve { scheme, m_ren, charge: e, lambdas: lambdas.to_vec(), m_bare, lambda_star })
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares slope of `ln(series)` over the central 60% of the samples.
pub fn fit_growth_rate(series: &[f64], dt: f64) -> Result<GrowthFit> {
    let n = series.len();
    let lo = (0.2 * n as f64).floor() as usize;
    let hi = ((0.8 * n as f64).ceil() as usize).min(n);
    if hi < lo + 3 {
        return Err(Error::SeriesTooShort { len: n, min: 5 });
    }
    let mut ts = Vec::with_capacity(hi - lo);
    let mut ys = Vec::with_capacity(hi - lo);
    for (k, &v) in series.iter().enumerate().take(hi).skip(lo) {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositive { index: k, value: v });
        }
        ts.push(k as f64 * dt);
        ys.push(v.ln());
    }
    let m = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let rate = sxy / sxx;
    let intercept = ym - rate * tm;
    let ssr: f64 = ts.iter().zip(&ys).map(|(t, y)| (y - intercept - rate * t).powi(2)).sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(GrowthFit { rate, stderr, intercept, points: ts.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub ledger: EnergyLedger,
    pub max_abs_residual: f64,
    pub relative_residual: f64,
    /// Largest mismatch between stored and recomputed `H_sys`.
    pub h_sys_mismatch: f64,
    pub h_gamma_nonincreasing: bool,
    pub h_xi_zero: bool,
}

/// Reassembles the ledger, recomputing `H_sys` from the recorded states.
pub fn energy_audit(traj: &Trajectory, ledger: &EnergyLedger, scenario: &Scenario) -> Result<AuditReport> {
    if ledger.len() != traj.samples.len() {
        return Err(Error::Missing(format!(
            "ledger has {} entries for {} trajectory samples",
            ledger.len(),
            traj.samples.len()
        )));
    }
    if ledger.is_empty() {
        return Err(Error::Missing("empty ledger".into()));
    }
    let ff = scenario.force_field();
    let rel = scenario.equation_family == EquationFamily::ConsistentRelativistic;
    let mut rebuilt = EnergyLedger::default();
    let mut mismatch = 0.0f64;
    for (k, s) in traj.samples.iter().enumerate() {
        let st = &s.state;
        let h = match scenario.equation_family {
            EquationFamily::Consistent1OverC3 | EquationFamily::ConsistentRelativistic => {
                crate::integrators::consistent::system_energy(&ff, &st.positions, &st.momenta, rel)?
            }
            _ => 0.5 * st.momenta[0].norm_squared() / ff.particles[0].mass + ff.external_energy(&st.positions),
        };
        mismatch = mismatch.max((h - ledger.h_sys[k]).abs());
        rebuilt.push(ledger.times[k], h, ledger.h_gamma[k], ledger.h_xi[k]);
    }
    let scale = rebuilt.energy_scale().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let nonincreasing = rebuilt.h_gamma.windows(2).all(|w| w[1] <= w[0] + tol);
    let xi_zero = rebuilt.h_xi.iter().all(|&v| v == 0.0);
    Ok(AuditReport {
        max_abs_residual: rebuilt.max_abs_residual(),
        relative_residual: rebuilt.relative_residual(),
        h_sys_mismatch: mismatch,
        h_gamma_nonincreasing: nonincreasing,
        h_xi_zero: xi_zero,
        ledger: rebuilt,
    })
}

/// Amplitude relaxation rate of the harmonic well under each family.
pub fn relaxation_rate(scenario: &Scenario) -> Option<f64> {
    let w0 = scenario.external_potential.omega0()?;
    let p = scenario.particles.first()?;
    let tau = tau_m(p, &scenario.units);
    let rate = match scenario.equation_family {
        EquationFamily::Qbm => p.charge * p.charge * GAMMA0 / p.mass,
        _ => 0.5 * tau * w0 * w0,
    };
    (rate > 0.0).then_some(rate)
}

pub const EQUIPARTITION_MIN_RELAXATIONS: f64 = 100.0;
pub const EQUIPARTITION_BURN_IN: f64 = 10.0;

/// `⟨x²⟩ m ω₀² / k_BT` per Cartesian component after a burn-in of ten
/// relaxation times; `0` at zero temperature.
pub fn equipartition_check(traj: &Trajectory, scenario: &Scenario) -> Result<f64> {
    equipartition_ensemble(std::slice::from_ref(traj), scenario)
}

/// Same ratio pooled over independent replicas.
pub fn equipartition_ensemble(trajs: &[Trajectory], scenario: &Scenario) -> Result<f64> {
    let w0 = scenario
        .external_potential
        .omega0()
        .ok_or_else(|| Error::InvalidInput("equipartition needs a harmonic potential".into()))?;
    let rate = relaxation_rate(scenario).ok_or_else(|| Error::InvalidInput("equipartition needs damping".into()))?;
    if scenario.units.kb_t == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for traj in trajs {
        let t_end = traj.samples.last().map(|s| s.state.time).unwrap_or(0.0);
        let have = t_end * rate;
        if have < EQUIPARTITION_MIN_RELAXATIONS {
            return Err(Error::InsufficientRun { have, need: EQUIPARTITION_MIN_RELAXATIONS });
        }
        let t0 = EQUIPARTITION_BURN_IN / rate;
        for s in traj.samples.iter().filter(|s| s.state.time >= t0) {
            sum += s.state.positions[0].norm_squared() / 3.0;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Missing("no samples after burn-in".into()));
    }
    let m = scenario.particles[0].mass;
    Ok(sum / count as f64 * m * w0 * w0 / scenario.units.kb_t)
}

/// Mean and standard error.
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleLedgerStats {
    pub replicas: usize,
    pub mean_final_residual: f64,
    pub mean_final_h_xi: f64,
    pub stderr_final_h_xi: f64,
    pub mean_final_h_gamma: f64,
}

/// Final-time ledger statistics across replicas.
pub fn ensemble_ledger_stats(outputs: &[RunOutput]) -> EnsembleLedgerStats {
    let last = |f: fn(&EnergyLedger) -> &Vec<f64>| -> Vec<f64> {
        outputs.iter().map(|o| f(&o.ledger).last().copied().unwrap_or(0.0)).collect()
    };
    let (res, _) = mean_stderr(&last(|l| &l.residual));
    let (xi, xi_se) = mean_stderr(&last(|l| &l.h_xi));
    let (g, _) = mean_stderr(&last(|l| &l.h_gamma));
    EnsembleLedgerStats {
        replicas: outputs.len(),
        mean_final_residual: res,
        mean_final_h_xi: xi,
        stderr_final_h_xi: xi_se,
        mean_final_h_gamma: g,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_cutoff_value() {
        // 3π² for m = e = 1
        assert!((critical_cutoff(1.0, 1.0) - 29.608_813_203_268_076).abs() < 1e-12);
        assert!(mass_renorm_standard(1.0, critical_cutoff(1.0, 1.0), 1.0).abs() < 1e-15);
        assert_eq!(mass_renorm_standard(1.3, 0.0, 2.0), 1.3);
    }

    #[test]
    fn consistent_root() {
        assert_eq!(mass_renorm_consistent(0.7, 0.0, 1.0), 0.7);
        // 2e²γ(0) = 1 at Λ = 3π²: m_b² − m_b − 1 = 0
        let mb = mass_renorm_consistent(1.0, critical_cutoff(1.0, 1.0), 1.0);
        assert!((mb - 1.618_033_988_749_894_8).abs() < 1e-15);
        for l in log_grid(1e-3, 1e6, 50) {
            let mb = mass_renorm_consistent(1.0, l, 1.0);
            assert!(mb > 0.0);
            let g = 2.0 * gamma_at_zero(l);
            assert!((mb * mb - mb - g).abs() < 1e-12 * mb * mb);
            assert!((renormalized_mass_consistent(mb, l, 1.0) - 1.0).abs() < 1e-12);
        }
        assert!((renormalized_mass_standard(mass_renorm_standard(1.0, 5.0, 1.0), 5.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn renorm_curves() {
        let grid = log_grid(1.0, 1e4, 97);
        let std = RenormCurve::compute(RenormScheme::StandardAl, 1.0, 1.0, &grid).unwrap();
        let star = std.lambda_star.unwrap();
        assert!((star - critical_cutoff(1.0, 1.0)).abs() < 1e-9 * star);
        let con = RenormCurve::compute(RenormScheme::ConsistentMagnetostatic, 1.0, 1.0, &grid).unwrap();
        assert!(con.lambda_star.is_none() && con.m_bare.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn growth_fit() {
        let tau = 0.37;
        let dt = 0.01;
        let s: Vec<f64> = (0..500).map(|k| 3.0 * (k as f64 * dt / tau).exp()).collect();
        let f = fit_growth_rate(&s, dt).unwrap();
        assert!((f.rate - 1.0 / tau).abs() < 1e-6 / tau);
        let scaled: Vec<f64> = s.iter().map(|v| v * 1e7).collect();
        assert!((fit_growth_rate(&scaled, dt).unwrap().rate - f.rate).abs() <= 1e-12 * f.rate);
        let flat = fit_growth_rate(&[2.0; 100], 0.1).unwrap();
        assert!(flat.rate.abs() <= flat.stderr.max(1e-15));
        let mut bad = s.clone();
        bad[250] = -1.0;
        assert!(matches!(fit_growth_rate(&bad, dt), Err(Error::NonPositive { index: 250, .. })));
    }
}
