//! Both gain matrices (t_a = 4 and t_a = 10), run in parallel and printed
//! side by side.

use vsg_bess::export::summary_table;
use vsg_bess::{run_sweep, Preset};

fn main() -> vsg_bess::Result<()> {
    for preset in [Preset::Table1, Preset::Table2] {
        let run = run_sweep(&preset.scenarios())?;
        println!("{preset} (t_a = {} s)", preset.t_a());
        print!("{}", summary_table(&run.result));
        println!();
    }
    Ok(())
}
