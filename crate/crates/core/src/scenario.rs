//! Scenarios, the built-in contingency matrices and the sweep runner.
//!
//! A configuration file is JSON. It holds either a single scenario object or
//! a sweep:
//!
//! ```json
//! {
//!   "defaults": { "vsg": { "t_a": 10.0 }, "t_end": 40.0 },
//!   "scenarios": [
//!     { "name": "damped",   "vsg": { "k_d": 400.0 } },
//!     { "name": "undamped", "vsg": { "k_d": 0.0 } }
//!   ]
//! }
//! ```
//!
//! Each scenario is the `defaults` block deep-merged with the scenario's own
//! object; anything still missing takes the built-in default. Omitting
//! `events` selects the standard contingency (2.749 MW of load lost at
//! t = 1 s for 0.2 s).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{simulate, Event, SimConfig, SwingForm, Trace};
use crate::error::{Error, Result};
use crate::metrics::{FrequencyMetrics, DEFAULT_ROCOF_WINDOW, DEFAULT_SETTLING_BAND};
use crate::perunit::{validate, BaseQuantities, GridParams, VsgParams};
use crate::sizing::{
    build_report, SizingOptions, SizingReport, DEFAULT_SIZING_HORIZON, ROCOF_LIMIT,
};

/// Size of the standard contingency, MW.
pub const CONTINGENCY_MW: f64 = 2.749;
pub const CONTINGENCY_START: f64 = 1.0;
pub const CONTINGENCY_DURATION: f64 = 0.2;

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub vsg: VsgParams,
    pub grid: GridParams,
    pub base: BaseQuantities,
    pub events: Vec<Event>,
    pub t_end: f64,
    pub dt: f64,
    pub swing: SwingForm,
    pub rocof_window: f64,
    pub rocof_limit: f64,
    pub settling_band: f64,
    pub sizing_horizon: f64,
    /// Installed DG capacity for the 10 % rule, MW. Defaults to the PV
    /// output on the inverter base.
    pub dg_capacity_mw: Option<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        let grid = GridParams::default();
        Scenario {
            name: "scenario".into(),
            vsg: VsgParams::default(),
            grid,
            base: BaseQuantities::default(),
            events: vec![standard_contingency(&grid)],
            t_end: 40.0,
            dt: 1e-3,
            swing: SwingForm::Uniform,
            rocof_window: DEFAULT_ROCOF_WINDOW,
            rocof_limit: ROCOF_LIMIT,
            settling_band: DEFAULT_SETTLING_BAND,
            sizing_horizon: DEFAULT_SIZING_HORIZON,
            dg_capacity_mw: None,
        }
    }
}

/// Loss of [`CONTINGENCY_MW`] of load for [`CONTINGENCY_DURATION`] seconds.
pub fn standard_contingency(grid: &GridParams) -> Event {
    Event::load_loss(
        CONTINGENCY_MW,
        grid,
        CONTINGENCY_START,
        CONTINGENCY_DURATION,
    )
}

impl Scenario {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            t_end: self.t_end,
            dt: self.dt,
            swing: self.swing,
        }
    }

    /// Start of the earliest event, or 0 for an undisturbed run.
    pub fn t_event(&self) -> f64 {
        self.events
            .iter()
            .map(|e| e.t_start)
            .reduce(f64::min)
            .unwrap_or(0.0)
    }

    pub fn sizing_options(&self) -> SizingOptions {
        SizingOptions {
            horizon: self.sizing_horizon,
            rocof_limit: self.rocof_limit,
            dg_capacity_mw: self
                .dg_capacity_mw
                .unwrap_or(self.vsg.p_pv * self.base.s_base()),
        }
    }

    /// Checks parameter bounds plus the run settings.
    pub fn validate(&self) -> Result<()> {
        let mut violations = match validate(&self.vsg, &self.grid, &self.base) {
            Ok(_) => Vec::new(),
            Err(Error::Validation(v)) => v,
            Err(e) => return Err(e),
        };
        let mut check = |ok: bool, field: &'static str, bound: &'static str, value: f64| {
            if !(ok && value.is_finite()) {
                violations.push(crate::perunit::Violation::new(field, bound, value));
            }
        };
        check(self.t_end > 0.0, "t_end", "must be > 0", self.t_end);
        check(self.dt > 0.0, "dt", "must be > 0", self.dt);
        check(
            self.dt <= self.vsg.t_pll / 5.0,
            "dt",
            "must be <= vsg.t_pll / 5",
            self.dt,
        );
        check(
            self.rocof_window >= self.dt,
            "rocof_window",
            "must be >= dt",
            self.rocof_window,
        );
        check(
            self.rocof_limit >= 0.0,
            "rocof_limit",
            "must be >= 0",
            self.rocof_limit,
        );
        check(
            self.settling_band > 0.0,
            "settling_band",
            "must be > 0",
            self.settling_band,
        );
        check(
            self.sizing_horizon > 0.0,
            "sizing_horizon",
            "must be > 0",
            self.sizing_horizon,
        );
        for e in &self.events {
            check(
                e.t_start >= 0.0,
                "events.t_start",
                "must be >= 0",
                e.t_start,
            );
            check(true, "events.magnitude", "must be finite", e.magnitude);
            if let Some(d) = e.duration {
                check(d > 0.0, "events.duration", "must be > 0", d);
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            for v in &mut violations {
                v.scenario = Some(self.name.clone());
            }
            Err(Error::Validation(violations))
        }
    }
}

/// Built-in scenario matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `k_d ∈ {400, 0} × k_omega ∈ {20, 40}` at `t_a = 4 s`.
    Table1,
    /// The same matrix at `t_a = 10 s`.
    Table2,
}

impl Preset {
    pub fn t_a(self) -> f64 {
        match self {
            Preset::Table1 => 4.0,
            Preset::Table2 => 10.0,
        }
    }

    /// The four scenarios in table row order.
    pub fn scenarios(self) -> Vec<Scenario> {
        matrix(&[self.t_a()], &Scenario::default())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            other => Err(Error::domain(format!("unknown preset '{other}'"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
        })
    }
}

/// The damping/droop matrix at each inertia in `t_a`, starting from
/// `template`.
pub fn matrix(t_a: &[f64], template: &Scenario) -> Vec<Scenario> {
    let mut out = Vec::new();
    for &ta in t_a {
        for k_d in [400.0, 0.0] {
            for k_omega in [20.0, 40.0] {
                let mut s = template.clone();
                s.name = format!("ta{ta}_kd{k_d}_kw{k_omega}");
                s.vsg.t_a = ta;
                s.vsg.k_d = k_d;
                s.vsg.k_omega = k_omega;
                out.push(s);
            }
        }
    }
    out
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

/// Parses configuration text. `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<Scenario>> {
    let config_err = |message: String| Error::Config {
        path: origin.to_string(),
        message,
    };
    let root: Value = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
    let Value::Object(mut obj) = root else {
        return Err(config_err("top level must be a JSON object".into()));
    };

    let (defaults, entries) = if obj.contains_key("scenarios") {
        let defaults = obj
            .remove("defaults")
            .unwrap_or(Value::Object(Default::default()));
        let scenarios = obj.remove("scenarios").unwrap_or(Value::Null);
        if let Some(k) = obj.keys().next() {
            return Err(config_err(format!(
                "unknown top-level field `{k}`, expected `defaults` or `scenarios`"
            )));
        }
        let Value::Array(list) = scenarios else {
            return Err(config_err("`scenarios` must be an array".into()));
        };
        (defaults, list)
    } else {
        (Value::Object(Default::default()), vec![Value::Object(obj)])
    };
    if entries.is_empty() {
        return Err(config_err("no scenarios".into()));
    }

    let mut scenarios = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let mut v = defaults.clone();
        merge(&mut v, entry);
        let mut s: Scenario =
            serde_json::from_value(v).map_err(|e| config_err(format!("scenario {i}: {e}")))?;
        let named = entry.get("name").is_some() || defaults.get("name").is_some();
        if !named {
            s.name = format!("scenario{i}");
        }
        // the default event is expressed on the default grid base
        if entry.get("events").is_none() && defaults.get("events").is_none() {
            s.events = vec![standard_contingency(&s.grid)];
        }
        scenarios.push(s);
    }

    let mut seen = HashSet::new();
    for s in &scenarios {
        if !seen.insert(s.name.as_str()) {
            return Err(config_err(format!("duplicate scenario name '{}'", s.name)));
        }
    }

    let violations: Vec<_> = scenarios
        .iter()
        .filter_map(|s| match s.validate() {
            Err(Error::Validation(v)) => Some(v),
            _ => None,
        })
        .flatten()
        .collect();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(scenarios)
}

/// Loads a configuration file, or a preset when `source` names one.
pub fn load_config(source: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let path = source.as_ref();
    if let Some(preset) = path.to_str().and_then(|s| s.parse::<Preset>().ok()) {
        if !path.exists() {
            return Ok(preset.scenarios());
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Results of one simulated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub metrics: FrequencyMetrics,
    pub sizing: SizingReport,
    pub trace: Trace,
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    s.validate()?;
    let trace = simulate(&s.vsg, &s.grid, &s.base, &s.events, &s.sim_config())?;
    let t_event = s.t_event().min(trace.t_end());
    let metrics = FrequencyMetrics::from_trace(&trace, s.rocof_window, s.settling_band, t_event)?;
    let sizing = build_report(&metrics, &trace, t_event, &s.base, &s.sizing_options())?;
    Ok(ScenarioRun {
        metrics,
        sizing,
        trace,
    })
}

/// One summary row; a failed scenario keeps its identity and the error text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub t_a: f64,
    pub k_d: f64,
    pub k_omega: f64,
    pub outcome: std::result::Result<RowValues, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowValues {
    pub f_min: f64,
    pub f_max: f64,
    pub rocof_max: f64,
    pub charge_peak: f64,
    pub discharge_peak: f64,
    pub power_range: f64,
    pub e_batt: f64,
    pub e_first_swing: f64,
    pub settling_time: Option<f64>,
    pub power_rating_mw: f64,
    pub energy_rating_mwh: f64,
    pub compliant: bool,
}

impl RowValues {
    fn new(m: &FrequencyMetrics, r: &SizingReport) -> Self {
        RowValues {
            f_min: m.f_min,
            f_max: m.f_max,
            rocof_max: m.rocof_max,
            charge_peak: m.charge_peak,
            discharge_peak: m.discharge_peak,
            power_range: m.power_range,
            e_batt: r.e_batt,
            e_first_swing: r.e_first_swing,
            settling_time: m.settling_time,
            power_rating_mw: r.power_rating_mw,
            energy_rating_mwh: r.energy_rating_mwh,
            compliant: r.rocof_compliant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, name: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Values of the row with the given gains, if it ran.
    pub fn values(&self, t_a: f64, k_d: f64, k_omega: f64) -> Option<&RowValues> {
        self.rows
            .iter()
            .find(|r| r.t_a == t_a && r.k_d == k_d && r.k_omega == k_omega)
            .and_then(|r| r.outcome.as_ref().ok())
    }
}

/// A sweep's summary plus each scenario's trace (`None` where it failed).
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub result: SweepResult,
    pub names: Vec<String>,
    pub traces: Vec<Option<Trace>>,
}

/// Runs every scenario in parallel. Row order follows input order; a failed
/// scenario is recorded in its row without stopping the others.
pub fn run_sweep(scenarios: &[Scenario]) -> Result<SweepRun> {
    run_sweep_with(scenarios, true)
}

pub fn run_sweep_with(scenarios: &[Scenario], parallel: bool) -> Result<SweepRun> {
    if scenarios.is_empty() {
        return Err(Error::domain("sweep needs at least one scenario"));
    }
    let runs: Vec<Result<ScenarioRun>> = if parallel {
        scenarios.par_iter().map(run_scenario).collect()
    } else {
        scenarios.iter().map(run_scenario).collect()
    };
    Ok(SweepRun::from_runs(scenarios, runs))
}

impl SweepRun {
    /// Assembles rows from finished runs, one per scenario, in order.
    pub fn from_runs(scenarios: &[Scenario], runs: Vec<Result<ScenarioRun>>) -> Self {
        let mut rows = Vec::with_capacity(runs.len());
        let mut traces = Vec::with_capacity(runs.len());
        for (s, run) in scenarios.iter().zip(runs) {
            let (outcome, trace) = match run {
                Ok(r) => (Ok(RowValues::new(&r.metrics, &r.sizing)), Some(r.trace)),
                Err(e) => (Err(e.to_string()), None),
            };
            rows.push(SweepRow {
                name: s.name.clone(),
                t_a: s.vsg.t_a,
                k_d: s.vsg.k_d,
                k_omega: s.vsg.k_omega,
                outcome,
            });
            traces.push(trace);
        }
        SweepRun {
            result: SweepResult { rows },
            names: scenarios.iter().map(|s| s.name.clone()).collect(),
            traces,
        }
    }

    /// Number of scenarios that failed.
    pub fn failures(&self) -> usize {
        self.result
            .rows
            .iter()
            .filter(|r| r.outcome.is_err())
            .count()
    }
}
