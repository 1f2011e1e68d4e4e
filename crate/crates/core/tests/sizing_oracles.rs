//! Metrics and sizing on simulated traces, checked against brute-force
//! oracles written independently of the library code paths.

use vsg_bess::dynamics::Trace;
use vsg_bess::metrics::{battery_peaks, rocof, settling_time, FrequencyMetrics};
use vsg_bess::scenario::{run_scenario, Scenario};
use vsg_bess::sizing::{build_report, energy_split, energy_to_first_zero_crossing, SizingOptions};
use vsg_bess::BaseQuantities;

fn scenario(t_a: f64, k_d: f64, k_omega: f64) -> Scenario {
    let mut s = Scenario::default();
    s.vsg.t_a = t_a;
    s.vsg.k_d = k_d;
    s.vsg.k_omega = k_omega;
    s
}

fn trace(t_a: f64, k_d: f64, k_omega: f64) -> Trace {
    run_scenario(&scenario(t_a, k_d, k_omega)).unwrap().trace
}

/// Windowed slope by scanning sample times rather than index offsets.
fn rocof_oracle(tr: &Trace, window: f64) -> f64 {
    let t = tr.time();
    let f = tr.f_pcc();
    let mut best = 0.0f64;
    let mut j = 0;
    for i in 0..t.len() {
        while j < t.len() && t[j] < t[i] + window - 0.5 * tr.dt() {
            j += 1;
        }
        if j >= t.len() {
            break;
        }
        best = best.max(((f[j] - f[i]) / (t[j] - t[i])).abs());
    }
    best
}

#[test]
fn rocof_matches_scan_oracle_on_simulated_run() {
    let tr = trace(4.0, 400.0, 20.0);
    for window in [0.001, 0.02, 0.1, 0.5] {
        let got = rocof(&tr, window).unwrap();
        let want = rocof_oracle(&tr, window);
        assert!(
            (got - want).abs() < 1e-9,
            "window {window}: {got} vs {want}"
        );
    }
}

#[test]
fn longer_inertia_needs_more_charging_power() {
    let (c4, _) = battery_peaks(&trace(4.0, 400.0, 20.0));
    let (c10, _) = battery_peaks(&trace(10.0, 400.0, 20.0));
    assert!(c10 > c4, "{c10} vs {c4}");
}

#[test]
fn stiffer_droop_settles_no_later() {
    let t20 = settling_time(&trace(10.0, 400.0, 20.0), 0.05, 1.0).unwrap();
    let t40 = settling_time(&trace(10.0, 400.0, 40.0), 0.05, 1.0).unwrap();
    let t40 = t40.expect("k_omega = 40 run never settled");
    if let Some(t20) = t20 {
        assert!(t40 <= t20, "{t40} vs {t20}");
    }
}

#[test]
fn first_swing_equals_first_lobe_of_split() {
    let tr = trace(4.0, 400.0, 20.0);
    let fs = energy_to_first_zero_crossing(&tr, 1.0).unwrap();
    let t_cross = fs.crossing.expect("battery power never reversed");
    // the sample just past the crossing closes the first lobe
    let t_after = (t_cross / tr.dt()).ceil() * tr.dt();
    let split = energy_split(&tr, 1.0, t_after).unwrap();
    let p_first = tr.p_bess()[(1.0 / tr.dt()) as usize + 5];
    let lobe = if p_first < 0.0 {
        split.stored
    } else {
        split.delivered
    };
    assert!((fs.energy - lobe).abs() < 1e-9, "{} vs {lobe}", fs.energy);
    assert!(fs.energy > 0.0);
}

#[test]
fn undamped_high_inertia_discharges_harder_than_it_charges() {
    let s = scenario(10.0, 0.0, 20.0);
    let run = run_scenario(&s).unwrap();
    assert!(
        run.metrics.discharge_peak > run.metrics.charge_peak,
        "charge {} discharge {}",
        run.metrics.charge_peak,
        run.metrics.discharge_peak
    );
    let r = run.sizing;
    assert_eq!(r.e_batt, r.ess_stored + r.ess_delivered);
    assert!(r.e_first_swing <= r.e_batt);
    assert_eq!(r.power_rating, run.metrics.discharge_peak);
}

#[test]
fn report_from_metrics_matches_scenario_run() {
    let s = scenario(4.0, 0.0, 40.0);
    let run = run_scenario(&s).unwrap();
    let m = FrequencyMetrics::from_trace(&run.trace, s.rocof_window, s.settling_band, 1.0).unwrap();
    let opts = SizingOptions {
        dg_capacity_mw: 2.75,
        ..SizingOptions::default()
    };
    let r = build_report(&m, &run.trace, 1.0, &BaseQuantities::default(), &opts).unwrap();
    assert_eq!(r, run.sizing);
    assert!((r.ten_percent_rule_mw - 0.275).abs() < 1e-15);
}

#[test]
fn split_on_simulated_trace_converges_at_second_order() {
    let tr = trace(4.0, 0.0, 20.0);
    // re-sample at 1, 2 and 4 steps; quadrature error should scale with h^2
    let sub = |stride: usize| {
        let n = (tr.len() - 1) / stride * stride + 1;
        let f: Vec<f64> = tr.f_pcc()[..n].iter().step_by(stride).copied().collect();
        let p: Vec<f64> = tr.p_bess()[..n].iter().step_by(stride).copied().collect();
        let t = Trace::from_frequency_and_battery(tr.dt() * stride as f64, 60.0, f, p).unwrap();
        energy_split(&t, 1.0, 31.0).unwrap().total()
    };
    let (e1, e2, e4) = (sub(1), sub(2), sub(4));
    let ratio = (e4 - e2) / (e2 - e1);
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
}
