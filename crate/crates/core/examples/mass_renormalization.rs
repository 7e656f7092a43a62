//! Bare mass needed for a fixed observed mass as the cutoff grows, in the
//! standard additive scheme and the magnetostatic scheme.

use emlangevin::diagnostics::{critical_cutoff, log_grid, RenormCurve, RenormScheme};

fn main() -> emlangevin::Result<()> {
    let (m, e) = (1.0, 1.0);
    let grid = log_grid(1.0, 1e5, 11);
    let std = RenormCurve::compute(RenormScheme::StandardAl, m, e, &grid)?;
    let con = RenormCurve::compute(RenormScheme::ConsistentMagnetostatic, m, e, &grid)?;
    println!("{:>12} {:>14} {:>14}", "lambda", "standard", "consistent");
    for ((l, a), b) in grid.iter().zip(&std.m_bare).zip(&con.m_bare) {
        println!("{l:12.4e} {a:14.6} {b:14.6}");
    }
    println!("standard bare mass crosses zero at {:.9} (analytic {:.9})", std.lambda_star.unwrap(), critical_cutoff(m, e));
    println!("consistent bare mass stays positive: {}", con.lambda_star.is_none());
    Ok(())
}
