//! With the resummed kinetic term the coordinate speed stays below c even
//! for |p|/m far above one.

use emlangevin::demo::{max_speed, relativistic};
use emlangevin::integrators::run;

fn main() -> emlangevin::Result<()> {
    for g in [0.1, 1.0, 10.0, 100.0, 1000.0] {
        let out = run(&relativistic(g))?;
        println!("|p|/m = {g:7.1}: max |v| = {:.9}", max_speed(&out.trajectory));
    }
    Ok(())
}
