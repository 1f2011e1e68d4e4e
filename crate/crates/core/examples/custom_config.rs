//! A JSON sweep definition with shared defaults, exported to CSV.
//! Output goes to the directory given as the first argument, or a temp dir.

use std::path::PathBuf;

use vsg_bess::export::{export, SummaryFormat};
use vsg_bess::run_sweep;
use vsg_bess::scenario::parse_config;

const CONFIG: &str = r#"{
    "defaults": {
        "t_end": 20.0,
        "vsg": {"t_a": 6.0},
        "grid": {"h_grid": 3.0}
    },
    "scenarios": [
        {"name": "weak_damping", "vsg": {"k_d": 50.0}},
        {"name": "strong_droop", "vsg": {"k_omega": 60.0}},
        {"name": "gen_trip", "events": [
            {"kind": "generation_step", "magnitude": -0.1, "t_start": 2.0}
        ]}
    ]
}"#;

fn main() -> vsg_bess::Result<()> {
    let scenarios = parse_config(CONFIG, "inline")?;
    let run = run_sweep(&scenarios)?;
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("vsg-bess-custom"));
    for p in export(&run, SummaryFormat::Csv, &out)? {
        println!("wrote {}", p.display());
    }
    print!(
        "{}",
        std::fs::read_to_string(out.join("summary.csv")).unwrap()
    );
    Ok(())
}
