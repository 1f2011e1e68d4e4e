//! Writes a trace CSV, reads it back and recomputes metrics and sizing from
//! the file alone.

use vsg_bess::export::{read_trace_csv, write_trace_csv};
use vsg_bess::scenario::{run_scenario, Scenario};
use vsg_bess::{build_report, FrequencyMetrics};

fn main() -> vsg_bess::Result<()> {
    let s = Scenario::default();
    let run = run_scenario(&s)?;
    let path = std::env::temp_dir().join("vsg-bess-trace.csv");
    write_trace_csv(&run.trace, &path)?;

    let tr = read_trace_csv(&path, s.base.f_base())?;
    let m = FrequencyMetrics::from_trace(&tr, s.rocof_window, s.settling_band, s.t_event())?;
    let r = build_report(&m, &tr, s.t_event(), &s.base, &s.sizing_options())?;
    println!("{} samples from {}", tr.len(), path.display());
    println!(
        "rocof    {:.6} (in memory {:.6})",
        m.rocof_max, run.metrics.rocof_max
    );
    println!(
        "e_batt   {:.6} (in memory {:.6})",
        r.e_batt, run.sizing.e_batt
    );
    Ok(())
}
