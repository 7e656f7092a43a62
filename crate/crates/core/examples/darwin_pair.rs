//! Two charges with Coulomb and magnetostatic (Darwin) interactions.

use emlangevin::demo::{darwin_pair, total_momentum};
use emlangevin::integrators::run;

fn main() -> emlangevin::Result<()> {
    let s = darwin_pair(10_000);
    let ff = s.force_field();
    let out = run(&s)?;
    let t = &out.trajectory;
    let p0 = total_momentum(t, 0);
    for k in (0..t.samples.len()).step_by(20) {
        let st = &t.samples[k].state;
        let vd = ff.darwin_potential(&st.positions, &st.momenta)?;
        println!(
            "t = {:5.2}  separation {:.4}  V_darwin {:+.5e}  |dP| {:.1e}  H {:.10}",
            st.time,
            (st.positions[0] - st.positions[1]).norm(),
            vd,
            (total_momentum(t, k) - p0).norm(),
            out.ledger.h_sys[k]
        );
    }
    Ok(())
}
