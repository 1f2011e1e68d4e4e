//! Command-line front end: one scenario (`run`), a preset or file sweep
//! (`sweep`), or metrics recomputed from a stored trace (`report`).
//!
//! Exit codes: 0 success, 1 invalid input, 2 simulation fault, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vsg_bess::export::{self, read_trace_csv, summary_table, SummaryFormat};
use vsg_bess::metrics::FrequencyMetrics;
use vsg_bess::scenario::{load_config, run_scenario, run_sweep, Scenario, SweepRun};
use vsg_bess::sizing::{build_report, SizingOptions, SizingReport};
use vsg_bess::{BaseQuantities, Error, SwingForm};

#[derive(Parser)]
#[command(
    name = "vsg-bess",
    version,
    about = "VSG inertia emulation and battery sizing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a single scenario and print its metrics and sizing.
    Run {
        /// JSON scenario file; built-in defaults when omitted.
        config: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        t_a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k_d: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k_omega: Option<f64>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a preset (`table1`, `table2`) or a JSON sweep file.
    Sweep {
        source: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Recompute metrics and sizing from a trace CSV.
    Report {
        trace: PathBuf,
        /// Start of the disturbance, s.
        #[arg(long, default_value_t = 1.0)]
        t_event: f64,
        #[arg(long, default_value_t = 60.0)]
        f_base: f64,
        /// Inverter power base, MW.
        #[arg(long, default_value_t = 2.75)]
        s_base: f64,
        #[arg(long, default_value_t = 0.1)]
        rocof_window: f64,
        #[arg(long, default_value_t = 30.0)]
        sizing_horizon: f64,
        /// DG capacity for the 10 % rule, MW.
        #[arg(long, default_value_t = 2.75)]
        dg_capacity: f64,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Integration step, s.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Simulated time, s.
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// ROCOF measurement window, s.
    #[arg(long)]
    rocof_window: Option<f64>,
    /// Energy integration horizon after the event, s.
    #[arg(long)]
    sizing_horizon: Option<f64>,
    /// Output directory for the summary and trace CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary format: csv or table.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Place damping outside the inertia term of the swing equation.
    #[arg(long)]
    eq1_literal: bool,
}

impl RunOpts {
    fn apply(&self, s: &mut Scenario) {
        if let Some(v) = self.dt {
            s.dt = v;
        }
        if let Some(v) = self.t_end {
            s.t_end = v;
        }
        if let Some(v) = self.rocof_window {
            s.rocof_window = v;
        }
        if let Some(v) = self.sizing_horizon {
            s.sizing_horizon = v;
        }
        if self.eq1_literal {
            s.swing = SwingForm::Literal;
        }
    }
}

fn print_run(name: &str, m: &FrequencyMetrics, r: &SizingReport) {
    println!("scenario            {name}");
    println!("f_min / f_max       {:.4} / {:.4} Hz", m.f_min, m.f_max);
    println!(
        "rocof_max           {:.4} Hz/s (compliant: {})",
        m.rocof_max, r.rocof_compliant
    );
    match m.settling_time {
        Some(t) => println!("settled at          {t:.3} s"),
        None => println!("settled at          never"),
    }
    println!(
        "battery peaks       charge {:.4} pu, discharge {:.4} pu, range {:.4} pu",
        m.charge_peak, m.discharge_peak, m.power_range
    );
    println!(
        "energy              stored {:.5}, delivered {:.5}, total {:.5} pu·s",
        r.ess_stored, r.ess_delivered, r.e_batt
    );
    println!("first swing         {:.5} pu·s", r.e_first_swing);
    println!(
        "rating              {:.4} MW, {:.6} MWh (10 % rule: {:.4} MW)",
        r.power_rating_mw, r.energy_rating_mwh, r.ten_percent_rule_mw
    );
}

fn finish_sweep(run: &SweepRun, opts: &RunOpts) -> Result<(), Error> {
    let format: SummaryFormat = opts.format.parse()?;
    if let Some(out) = &opts.out {
        for p in export::export(run, format, out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    for row in &run.result.rows {
        if let Err(e) = &row.outcome {
            eprintln!("scenario '{}' failed: {e}", row.name);
        }
    }
    match run.failures() {
        0 => Ok(()),
        n => Err(Error::SweepFailures(n)),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            t_a,
            k_d,
            k_omega,
            opts,
        } => {
            let mut s = match config {
                Some(p) => {
                    let mut all = load_config(&p)?;
                    if all.len() != 1 {
                        return Err(Error::Domain(format!(
                            "{} holds {} scenarios; use `sweep`",
                            p.display(),
                            all.len()
                        )));
                    }
                    all.remove(0)
                }
                None => Scenario::default(),
            };
            if let Some(v) = t_a {
                s.vsg.t_a = v;
            }
            if let Some(v) = k_d {
                s.vsg.k_d = v;
            }
            if let Some(v) = k_omega {
                s.vsg.k_omega = v;
            }
            opts.apply(&mut s);
            let single = run_scenario(&s)?;
            print_run(&s.name, &single.metrics, &single.sizing);
            let run = SweepRun::from_runs(std::slice::from_ref(&s), vec![Ok(single)]);
            finish_sweep(&run, &opts)
        }
        Command::Sweep { source, opts } => {
            let mut scenarios = load_config(Path::new(&source))?;
            for s in &mut scenarios {
                opts.apply(s);
                s.validate()?;
            }
            let run = run_sweep(&scenarios)?;
            print!("{}", summary_table(&run.result));
            finish_sweep(&run, &opts)
        }
        Command::Report {
            trace,
            t_event,
            f_base,
            s_base,
            rocof_window,
            sizing_horizon,
            dg_capacity,
        } => {
            let tr = read_trace_csv(&trace, f_base)?;
            let base = BaseQuantities::new(s_base, f_base);
            let m = FrequencyMetrics::from_trace(
                &tr,
                rocof_window,
                vsg_bess::metrics::DEFAULT_SETTLING_BAND,
                t_event,
            )?;
            let opts = SizingOptions {
                horizon: sizing_horizon,
                dg_capacity_mw: dg_capacity,
                ..SizingOptions::default()
            };
            let r = build_report(&m, &tr, t_event, &base, &opts)?;
            print_run(&trace.display().to_string(), &m, &r);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
