//! Initial operating point of the default plant and a 10 s undisturbed hold.

use vsg_bess::dynamics::Model;
use vsg_bess::scenario::Scenario;
use vsg_bess::{simulate, SimConfig};

fn main() -> vsg_bess::Result<()> {
    let s = Scenario::default();
    let model = Model::new(&s.vsg, &s.grid, &s.base, s.swing)?;
    let x0 = model.equilibrium()?;
    let out = model.outputs(&x0);
    println!("load angle      {:.6} rad", x0.delta);
    println!(
        "link power      {:.6} pu (limit {:.4})",
        out.p_e,
        s.vsg.max_link_power()
    );
    println!("battery power   {:.2e} pu", out.p_bess);

    let cfg = SimConfig {
        t_end: 10.0,
        ..s.sim_config()
    };
    let tr = simulate(&s.vsg, &s.grid, &s.base, &[], &cfg)?;
    let drift = tr
        .f_pcc()
        .iter()
        .map(|f| (f - 60.0).abs())
        .fold(0.0, f64::max);
    println!("max |f - 60| over {} s: {drift:.1e} Hz", tr.t_end());
    Ok(())
}
