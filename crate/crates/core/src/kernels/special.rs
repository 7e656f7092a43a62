//! The angular form factors of the transverse photon propagator.
//!
//! Both functions are direction averages of the transverse projector weighted
//! by `exp(i z cos θ)`, which gives the power series used below the branch
//! point:
//!
//! ```text
//! S̃₁(z) = (3/8) ∫₋₁¹ (1 + s²) cos(zs) ds
//! S̃₁(z) + S̃₀(z) = (3/4) ∫₋₁¹ (1 − s²) cos(zs) ds
//! ```

/// Below this argument the closed forms lose digits to cancellation in `z³`.
const SERIES_BRANCH: f64 = 1.0;
const SERIES_TERMS: usize = 12;

/// `S̃₁(z) = (3/2)[(z² − 1) sin z + z cos z]/z³`, with `S̃₁(0) = 1`.
pub fn s1_tilde(z: f64) -> f64 {
    let z = z.abs();
    if z < SERIES_BRANCH {
        // Σ (−1)^k z^{2k}/(2k)! · (3/4)(1/(2k+1) + 1/(2k+3))
        series(z, |k| 0.75 * (1.0 / (2 * k + 1) as f64 + 1.0 / (2 * k + 3) as f64))
    } else {
        let (s, c) = z.sin_cos();
        1.5 * ((z * z - 1.0) * s + z * c) / (z * z * z)
    }
}

/// `S̃₀(z) = −(3/2)[(z² − 3) sin z + 3z cos z]/z³`, with `S̃₀(z) ≈ z²/10` near 0.
pub fn s0_tilde(z: f64) -> f64 {
    let z = z.abs();
    if z < SERIES_BRANCH {
        series(z, |k| 0.75 * (1.0 / (2 * k + 1) as f64 - 3.0 / (2 * k + 3) as f64))
    } else {
        let (s, c) = z.sin_cos();
        -1.5 * ((z * z - 3.0) * s + 3.0 * z * c) / (z * z * z)
    }
}

/// `sin z / z`, the scalar-field analogue.
pub fn sinc(z: f64) -> f64 {
    let z = z.abs();
    if z < SERIES_BRANCH {
        series(z, |k| 1.0 / (2 * k + 1) as f64)
    } else {
        z.sin() / z
    }
}

fn series(z: f64, coeff: impl Fn(usize) -> f64) -> f64 {
    let z2 = z * z;
    let mut term = 1.0; // (−1)^k z^{2k}/(2k)!
    let mut sum = 0.0;
    for k in 0..SERIES_TERMS {
        sum += term * coeff(k);
        term *= -z2 / (((2 * k + 1) * (2 * k + 2)) as f64);
    }
    sum
}
