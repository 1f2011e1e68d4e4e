//! Battery power and energy ratings for one contingency, next to the
//! 10 % rule of thumb.

use vsg_bess::scenario::{run_scenario, Scenario};
use vsg_bess::sizing::{energy_split, energy_to_first_zero_crossing};

fn main() -> vsg_bess::Result<()> {
    let mut s = Scenario::default();
    s.vsg.t_a = 10.0;
    s.vsg.k_d = 0.0;
    let run = run_scenario(&s)?;
    let r = &run.sizing;

    println!("stored      {:.5} pu·s", r.ess_stored);
    println!("delivered   {:.5} pu·s", r.ess_delivered);
    println!(
        "first swing {:.5} pu·s, ends at {:?} s",
        r.e_first_swing, r.first_swing_crossing
    );
    println!("power       {:.4} MW", r.power_rating_mw);
    println!("energy      {:.6} MWh", r.energy_rating_mwh);
    println!("10 % rule   {:.4} MW", r.ten_percent_rule_mw);
    println!("rocof ok    {}", r.rocof_compliant);

    // energy over growing horizons
    let t0 = s.t_event();
    for h in [1.0, 5.0, 10.0, 30.0] {
        let e = energy_split(&run.trace, t0, t0 + h)?;
        println!("  {h:>4} s: {:.5} pu·s", e.total());
    }
    let fs = energy_to_first_zero_crossing(&run.trace, t0)?;
    println!("unclipped first swing {:.5} pu·s", fs.energy);
    Ok(())
}
