//! Conservative interactions: Coulomb, the Darwin magnetostatic coupling and
//! external potentials.
//!
//! With softening `ε`, every `1/r` is replaced by `1/ρ`, `ρ = √(r² + ε²)`,
//! consistently in the potentials and their gradients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ParticleSpec, EPSILON_0, GAMMA0};
use crate::{Mat3, Vec3};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExternalPotential {
    #[default]
    None,
    /// `U = ½ m ω₀² |x|²`.
    Harmonic { omega0: f64 },
    /// `U = (λ/4) |x|⁴`.
    Quartic { lambda: f64 },
    /// Radial table `U(|x|)`, natural cubic spline, held at the end slopes outside.
    Custom { radii: Vec<f64>, values: Vec<f64> },
}

impl ExternalPotential {
    pub fn omega0(&self) -> Option<f64> {
        match self {
            ExternalPotential::Harmonic { omega0 } => Some(*omega0),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, errors: &mut Vec<String>) {
        match self {
            ExternalPotential::None => {}
            ExternalPotential::Harmonic { omega0 } => {
                if !(omega0.is_finite() && *omega0 > 0.0) {
                    errors.push(format!("external_potential.omega0 must be finite and > 0, got {omega0}"));
                }
            }
            ExternalPotential::Quartic { lambda } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    errors.push(format!("external_potential.lambda must be finite and >= 0, got {lambda}"));
                }
            }
            ExternalPotential::Custom { radii, values } => {
                if radii.len() < 3 || radii.len() != values.len() {
                    errors.push("external_potential custom table needs >= 3 (radius, value) pairs of equal length".into());
                } else if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
                    errors.push("external_potential custom radii must start at 0 and increase strictly".into());
                }
                if radii.iter().chain(values).any(|v| !v.is_finite()) {
                    errors.push("external_potential custom table must be finite".into());
                }
            }
        }
    }
}

/// Natural cubic spline through `(x_k, y_k)`.
#[derive(Debug, Clone)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        // tridiagonal solve for second derivatives, m_0 = m_{n-1} = 0
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Spline { x: x.to_vec(), y: y.to_vec(), m }
    }

    /// Value, first and second derivative.
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t >= self.x[n - 1] {
            let (v, d1, _) = self.eval_in(n - 2, self.x[n - 1]);
            return (v + d1 * (t - self.x[n - 1]), d1, 0.0);
        }
        let i = self.x.partition_point(|&xk| xk <= t).clamp(1, n - 1) - 1;
        self.eval_in(i, t)
    }

    fn eval_in(&self, i: usize, t: f64) -> (f64, f64, f64) {
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

/// Evaluation context for all conservative forces of a scenario.
#[derive(Debug, Clone)]
pub struct ForceField {
    pub particles: Vec<ParticleSpec>,
    pub coulomb: bool,
    pub darwin: bool,
    pub external: ExternalPotential,
    pub softening: f64,
    spline: Option<Spline>,
}

impl ForceField {
    pub fn new(particles: Vec<ParticleSpec>, coulomb: bool, darwin: bool, external: ExternalPotential, softening: f64) -> Self {
        let spline = match &external {
            ExternalPotential::Custom { radii, values } if radii.len() >= 3 => Some(Spline::new(radii, values)),
            _ => None,
        };
        ForceField { particles, coulomb, darwin, external, softening, spline }
    }

    /// Single particle in an external potential, no interactions.
    pub fn single(particle: ParticleSpec, external: ExternalPotential) -> Self {
        ForceField::new(vec![particle], false, false, external, 0.0)
    }

    pub fn n(&self) -> usize {
        self.particles.len()
    }

    fn rho(&self, r: &Vec3, i: usize, j: usize) -> Result<f64> {
        let rho2 = r.norm_squared() + self.softening * self.softening;
        if rho2 == 0.0 {
            return Err(Error::Singular { i, j });
        }
        Ok(rho2.sqrt())
    }

    /// `F_i = Σ_j e_i e_j (r_i − r_j) / (4π ε₀ ρ³)`.
    pub fn coulomb_force(&self, x: &[Vec3]) -> Result<Vec<Vec3>> {
        let n = x.len();
        let mut f = vec![Vec3::zeros(); n];
        if !self.coulomb {
            return Ok(f);
        }
        for i in 0..n {
            for j in i + 1..n {
                let r = x[i] - x[j];
                let rho = self.rho(&r, i, j)?;
                let q = self.particles[i].charge * self.particles[j].charge;
                let fij = r * (q / (4.0 * PI * EPSILON_0 * rho * rho * rho));
                f[i] += fij;
                f[j] -= fij;
            }
        }
        Ok(f)
    }

    pub fn coulomb_energy(&self, x: &[Vec3]) -> Result<f64> {
        if !self.coulomb {
            return Ok(0.0);
        }
        let mut e = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let rho = self.rho(&(x[i] - x[j]), i, j)?;
                e += self.particles[i].charge * self.particles[j].charge / (4.0 * PI * EPSILON_0 * rho);
            }
        }
        Ok(e)
    }

    fn darwin_pair_coefficient(&self, i: usize, j: usize) -> f64 {
        // −2 (e_i/m_i)(e_j/m_j) · (3/4) γ₀
        -1.5 * GAMMA0 * self.particles[i].charge_ratio() * self.particles[j].charge_ratio()
    }

    /// `Σ_{i<j} −2 (e_i/m_i) p_iᵀ γ[r_ij; 0] (e_j/m_j) p_j`.
    pub fn darwin_potential(&self, x: &[Vec3], p: &[Vec3]) -> Result<f64> {
        if !self.darwin {
            return Ok(0.0);
        }
        let mut v = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let r = x[i] - x[j];
                let rho = self.rho(&r, i, j)?;
                let c = self.darwin_pair_coefficient(i, j);
                v += c * (p[i].dot(&p[j]) / rho + p[i].dot(&r) * p[j].dot(&r) / (rho * rho * rho));
            }
        }
        Ok(v)
    }

    /// Gradients of the Darwin potential: `(∇_x V, ∇_p V)` per particle.
    pub fn darwin_gradients(&self, x: &[Vec3], p: &[Vec3]) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
        let n = x.len();
        let mut gx = vec![Vec3::zeros(); n];
        let mut gp = vec![Vec3::zeros(); n];
        if !self.darwin {
            return Ok((gx, gp));
        }
        for i in 0..n {
            for j in i + 1..n {
                let r = x[i] - x[j];
                let rho = self.rho(&r, i, j)?;
                let c = self.darwin_pair_coefficient(i, j);
                let (pi, pj) = (&p[i], &p[j]);
                let (pir, pjr) = (pi.dot(&r), pj.dot(&r));
                let r3 = rho * rho * rho;
                let r5 = r3 * rho * rho;
                gp[i] += (pj / rho + r * (pjr / r3)) * c;
                gp[j] += (pi / rho + r * (pir / r3)) * c;
                let dr = (r * (-pi.dot(pj) / r3) + pi * (pjr / r3) + pj * (pir / r3) - r * (3.0 * pir * pjr / r5)) * c;
                gx[i] += dr;
                gx[j] -= dr;
            }
        }
        Ok((gx, gp))
    }

    pub fn darwin_grad_x(&self, x: &[Vec3], p: &[Vec3]) -> Result<Vec<Vec3>> {
        Ok(self.darwin_gradients(x, p)?.0)
    }

    pub fn darwin_grad_p(&self, x: &[Vec3], p: &[Vec3]) -> Result<Vec<Vec3>> {
        Ok(self.darwin_gradients(x, p)?.1)
    }

    fn radial(&self, x: &Vec3) -> (f64, f64, f64) {
        self.spline.as_ref().map(|s| s.eval(x.norm())).unwrap_or((0.0, 0.0, 0.0))
    }

    pub fn external_energy_one(&self, i: usize, x: &Vec3) -> f64 {
        match &self.external {
            ExternalPotential::None => 0.0,
            ExternalPotential::Harmonic { omega0 } => 0.5 * self.particles[i].mass * omega0 * omega0 * x.norm_squared(),
            ExternalPotential::Quartic { lambda } => 0.25 * lambda * x.norm_squared() * x.norm_squared(),
            ExternalPotential::Custom { .. } => self.radial(x).0,
        }
    }

    /// `−∇U` for particle `i`.
    pub fn external_force_one(&self, i: usize, x: &Vec3) -> Vec3 {
        match &self.external {
            ExternalPotential::None => Vec3::zeros(),
            ExternalPotential::Harmonic { omega0 } => -x * (self.particles[i].mass * omega0 * omega0),
            ExternalPotential::Quartic { lambda } => -x * (lambda * x.norm_squared()),
            ExternalPotential::Custom { .. } => {
                let r = x.norm();
                if r == 0.0 {
                    return Vec3::zeros();
                }
                -x * (self.radial(x).1 / r)
            }
        }
    }

    /// `−∂²U/∂x∂x` for particle `i`.
    pub fn external_jacobian_one(&self, i: usize, x: &Vec3) -> Mat3 {
        match &self.external {
            ExternalPotential::None => Mat3::zeros(),
            ExternalPotential::Harmonic { omega0 } => -Mat3::identity() * (self.particles[i].mass * omega0 * omega0),
            ExternalPotential::Quartic { lambda } => {
                -(Mat3::identity() * x.norm_squared() + x * x.transpose() * 2.0) * *lambda
            }
            ExternalPotential::Custom { .. } => {
                let r = x.norm();
                let (_, d1, d2) = self.radial(x);
                if r == 0.0 {
                    return -Mat3::identity() * d2;
                }
                let rr = x * x.transpose() / (r * r);
                -(rr * d2 + (Mat3::identity() - rr) * (d1 / r))
            }
        }
    }

    pub fn external_force(&self, x: &[Vec3]) -> Vec<Vec3> {
        x.iter().enumerate().map(|(i, xi)| self.external_force_one(i, xi)).collect()
    }

    pub fn external_jacobian(&self, x: &[Vec3]) -> Vec<Mat3> {
        x.iter().enumerate().map(|(i, xi)| self.external_jacobian_one(i, xi)).collect()
    }

    pub fn external_energy(&self, x: &[Vec3]) -> f64 {
        x.iter().enumerate().map(|(i, xi)| self.external_energy_one(i, xi)).sum()
    }

    /// Conservative force on each particle from `U + φ + V_D`, i.e. `−∇_x` of all three.
    pub fn total_force(&self, x: &[Vec3], p: &[Vec3]) -> Result<Vec<Vec3>> {
        let mut f = self.external_force(x);
        if self.coulomb {
            for (a, b) in f.iter_mut().zip(self.coulomb_force(x)?) {
                *a += b;
            }
        }
        if self.darwin {
            for (a, b) in f.iter_mut().zip(self.darwin_grad_x(x, p)?) {
                *a -= b;
            }
        }
        Ok(f)
    }

    /// Potential energy `U + φ + V_D`.
    pub fn potential_energy(&self, x: &[Vec3], p: &[Vec3]) -> Result<f64> {
        Ok(self.external_energy(x) + self.coulomb_energy(x)? + self.darwin_potential(x, p)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn pair(coulomb: bool, darwin: bool) -> ForceField {
        let ps = vec![ParticleSpec::new("a", 1.0, 1.0).unwrap(), ParticleSpec::new("b", 1.0, 1.0).unwrap()];
        ForceField::new(ps, coulomb, darwin, ExternalPotential::None, 0.0)
    }

    fn triple() -> ForceField {
        let ps = vec![
            ParticleSpec::new("a", 1.0, 1.0).unwrap(),
            ParticleSpec::new("b", 2.0, -0.5).unwrap(),
            ParticleSpec::new("c", 0.7, 1.3).unwrap(),
        ];
        ForceField::new(ps, true, true, ExternalPotential::None, 0.0)
    }

    #[test]
    fn coulomb_pair() {
        let f = pair(true, false);
        let x = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)];
        let c = f.coulomb_force(&x).unwrap();
        assert!((c[1].x - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((c[0] + c[1]).norm() == 0.0);
        let far = [Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0)];
        assert!((f.coulomb_force(&far).unwrap()[1].x * 4.0 - c[1].x).abs() < 1e-16);
        assert!(matches!(f.coulomb_force(&[Vec3::zeros(), Vec3::zeros()]), Err(Error::Singular { i: 0, j: 1 })));
    }

    #[test]
    fn softening_regularizes_coincidence() {
        let mut f = pair(true, true);
        f.softening = 0.1;
        let x = [Vec3::zeros(), Vec3::zeros()];
        let p = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        assert!(f.coulomb_force(&x).unwrap()[0].norm() == 0.0);
        assert!(f.darwin_potential(&x, &p).unwrap().is_finite());
    }

    #[test]
    fn darwin_pair_value() {
        let f = pair(false, true);
        let x = [Vec3::new(0.5, 0.0, 0.0), Vec3::new(-1.5, 0.0, 0.0)];
        let p = [Vec3::new(0.8, 0.0, 0.0), Vec3::new(0.8, 0.0, 0.0)];
        let v = f.darwin_potential(&x, &p).unwrap();
        assert!((v + 3.0 * GAMMA0 * 0.64 / 2.0).abs() < 1e-17);
        assert!((v + 0.64 / (4.0 * PI * 2.0)).abs() < 1e-17);
        let swapped = f.darwin_potential(&[x[1], x[0]], &[p[1], p[0]]).unwrap();
        assert!((v - swapped).abs() < 1e-18);
        let zero = f.darwin_potential(&x, &[Vec3::zeros(), Vec3::zeros()]).unwrap();
        assert_eq!(zero, 0.0);
        let (gx, gp) = f.darwin_gradients(&x, &[Vec3::zeros(), Vec3::zeros()]).unwrap();
        assert!(gx.iter().chain(&gp).all(|g| g.norm() == 0.0));
    }

    fn sample_state() -> (Vec<Vec3>, Vec<Vec3>) {
        let x = vec![Vec3::new(0.1, 0.2, -0.3), Vec3::new(1.1, -0.4, 0.5), Vec3::new(-0.6, 0.9, 0.2)];
        let p = vec![Vec3::new(0.3, -0.2, 0.7), Vec3::new(-0.5, 0.4, 0.1), Vec3::new(0.2, 0.6, -0.9)];
        (x, p)
    }

    fn check_fd(f: &ForceField, x: &[Vec3], p: &[Vec3]) {
        let (gx, gp) = f.darwin_gradients(x, p).unwrap();
        let h = 1e-6;
        for i in 0..x.len() {
            for a in 0..3 {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i][a] += h;
                xm[i][a] -= h;
                let d = (f.darwin_potential(&xp, p).unwrap() - f.darwin_potential(&xm, p).unwrap()) / (2.0 * h);
                assert!((d - gx[i][a]).abs() <= 1e-6 * gx[i][a].abs().max(1e-3 * GAMMA0), "x {i}{a}: {d} vs {}", gx[i][a]);
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                pp[i][a] += h;
                pm[i][a] -= h;
                let d = (f.darwin_potential(x, &pp).unwrap() - f.darwin_potential(x, &pm).unwrap()) / (2.0 * h);
                assert!((d - gp[i][a]).abs() <= 1e-6 * gp[i][a].abs().max(1e-3 * GAMMA0), "p {i}{a}");
            }
        }
    }

    #[test]
    fn darwin_gradients_match_finite_differences() {
        let (x, p) = sample_state();
        check_fd(&triple(), &x, &p);
        let mut soft = triple();
        soft.softening = 0.3;
        check_fd(&soft, &x, &p);
    }

    #[test]
    fn translation_invariance_and_third_law() {
        let f = triple();
        let (x, p) = sample_state();
        let shift = Vec3::new(3.0, -7.0, 11.0);
        let xs: Vec<Vec3> = x.iter().map(|v| v + shift).collect();
        let a = f.total_force(&x, &p).unwrap();
        let b = f.total_force(&xs, &p).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
        let net: Vec3 = a.iter().sum();
        assert!(net.norm() < 1e-16);
        let gsum: Vec3 = f.darwin_grad_x(&x, &p).unwrap().iter().sum();
        assert!(gsum.norm() < 1e-17);
    }

    #[test]
    fn rotation_covariance() {
        let f = triple();
        let (x, p) = sample_state();
        let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
        let xr: Vec<Vec3> = x.iter().map(|v| rot * v).collect();
        let pr: Vec<Vec3> = p.iter().map(|v| rot * v).collect();
        let a = f.total_force(&x, &p).unwrap();
        let b = f.total_force(&xr, &pr).unwrap();
        let (_, ga) = f.darwin_gradients(&x, &p).unwrap();
        let (_, gb) = f.darwin_gradients(&xr, &pr).unwrap();
        for k in 0..3 {
            assert!((rot * a[k] - b[k]).norm() < 1e-12);
            assert!((rot * ga[k] - gb[k]).norm() < 1e-12);
        }
        let va = f.potential_energy(&x, &p).unwrap();
        let vb = f.potential_energy(&xr, &pr).unwrap();
        assert!((va - vb).abs() < 1e-14);
    }

    #[test]
    fn external_potentials() {
        let p = ParticleSpec::new("e", 1.0, 1.0).unwrap();
        let none = ForceField::single(p.clone(), ExternalPotential::None);
        assert_eq!(none.external_force_one(0, &Vec3::new(1.0, 2.0, 3.0)), Vec3::zeros());
        let h = ForceField::single(p.clone(), ExternalPotential::Harmonic { omega0: 2.0 });
        assert_eq!(h.external_force_one(0, &Vec3::new(1.0, 0.0, 0.0)), Vec3::new(-4.0, 0.0, 0.0));
        assert_eq!(h.external_jacobian_one(0, &Vec3::new(1.0, 0.0, 0.0)), -Mat3::identity() * 4.0);

        let radii: Vec<f64> = (0..60).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = radii.iter().map(|r| 0.5 * r * r).collect();
        let pots = [
            ExternalPotential::Harmonic { omega0: 1.3 },
            ExternalPotential::Quartic { lambda: 0.7 },
            ExternalPotential::Custom { radii, values },
        ];
        let x = Vec3::new(0.7, -0.4, 1.1);
        for pot in pots {
            let ff = ForceField::single(p.clone(), pot.clone());
            let jac = ff.external_jacobian_one(0, &x);
            assert!((jac - jac.transpose()).abs().max() < 1e-15, "{pot:?}");
            let step = 1e-6;
            for a in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[a] += step;
                xm[a] -= step;
                let fd = -(ff.external_energy_one(0, &xp) - ff.external_energy_one(0, &xm)) / (2.0 * step);
                assert!((fd - ff.external_force_one(0, &x)[a]).abs() < 1e-7, "{pot:?}");
                let dj = (ff.external_force_one(0, &xp) - ff.external_force_one(0, &xm)) / (2.0 * step);
                for b in 0..3 {
                    assert!((dj[b] - jac[(b, a)]).abs() < 1e-6, "{pot:?}");
                }
            }
        }
    }

    #[test]
    fn custom_spline_reproduces_quadratic_interior() {
        let radii: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        let values: Vec<f64> = radii.iter().map(|r| 0.5 * r * r).collect();
        let ff = ForceField::single(ParticleSpec::new("e", 1.0, 1.0).unwrap(), ExternalPotential::Custom { radii, values });
        let x = Vec3::new(1.0, 2.0, 0.5);
        let f = ff.external_force_one(0, &x);
        assert!((f + x).norm() < 1e-6);
    }
}
