use crate::error::Result;

/// Stage of a classical RK4 step: start, midpoint (used twice) or end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Start,
    Mid,
    End,
}

/// One classical RK4 step of `y' = f(stage, y)`, in place.
pub fn rk4_step<F>(y: &mut [f64], dt: f64, mut f: F) -> Result<()>
where
    F: FnMut(Stage, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    f(Stage::Start, y, &mut k1)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    f(Stage::Mid, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    f(Stage::Mid, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    f(Stage::End, &tmp, &mut k4)?;
    for i in 0..n {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential() {
        let err = |dt: f64| {
            let mut y = vec![1.0];
            let steps = (1.0 / dt).round() as usize;
            for _ in 0..steps {
                rk4_step(&mut y, dt, |_, y, dy| {
                    dy[0] = -y[0];
                    Ok(())
                })
                .unwrap();
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 0.5, "{ratio}");
    }
}
