//! Damping inside versus outside the inertia term of the swing equation.

use vsg_bess::scenario::{run_scenario, Scenario};
use vsg_bess::SwingForm;

fn main() -> vsg_bess::Result<()> {
    for t_a in [4.0, 10.0] {
        for swing in [SwingForm::Uniform, SwingForm::Literal] {
            let mut s = Scenario::default();
            s.vsg.t_a = t_a;
            s.swing = swing;
            let m = run_scenario(&s)?.metrics;
            println!(
                "t_a {t_a:>4} {swing:?}: f {:.4}..{:.4} Hz, rocof {:.4} Hz/s, discharge {:.4} pu",
                m.f_min, m.f_max, m.rocof_max, m.discharge_peak
            );
        }
    }
    Ok(())
}
