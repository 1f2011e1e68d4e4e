//! Sensitivity of the measured ROCOF to the sliding-window length.

use vsg_bess::metrics::rocof;
use vsg_bess::scenario::{run_scenario, Scenario};

fn main() -> vsg_bess::Result<()> {
    let mut s = Scenario::default();
    s.vsg.k_d = 0.0;
    let tr = run_scenario(&s)?.trace;
    println!("window_s  rocof_hz_per_s");
    for w in [0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0] {
        println!("{w:>8}  {:.4}", rocof(&tr, w)?);
    }
    Ok(())
}
