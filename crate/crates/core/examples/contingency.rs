//! The standard load-loss event on the default VSG, with frequency and
//! battery metrics. Pass `t_a k_d k_omega` to try other gains.

use vsg_bess::scenario::{run_scenario, Scenario};

fn main() -> vsg_bess::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let mut s = Scenario::default();
    if let [t_a, k_d, k_omega] = args[..] {
        s.vsg.t_a = t_a;
        s.vsg.k_d = k_d;
        s.vsg.k_omega = k_omega;
    }
    s.validate()?;
    let run = run_scenario(&s)?;
    let m = &run.metrics;
    println!(
        "t_a {} k_d {} k_omega {}",
        s.vsg.t_a, s.vsg.k_d, s.vsg.k_omega
    );
    println!("frequency  {:.4} .. {:.4} Hz", m.f_min, m.f_max);
    println!("rocof      {:.4} Hz/s", m.rocof_max);
    println!("settling   {:?} s", m.settling_time);
    println!(
        "battery    charge {:.4}, discharge {:.4} pu",
        m.charge_peak, m.discharge_peak
    );

    // text plot of the first 4 s, scaled to the largest deviation
    let tr = &run.trace;
    let scale = 35.0 / m.max_deviation(60.0).max(1e-9);
    for k in (0..tr.len())
        .step_by(100)
        .take_while(|&k| tr.time()[k] <= 4.0)
    {
        let col = ((tr.f_pcc()[k] - 60.0) * scale).round() as i64 + 40;
        println!(
            "{:5.2} {:>w$}",
            tr.time()[k],
            "*",
            w = col.clamp(1, 79) as usize
        );
    }
    Ok(())
}
