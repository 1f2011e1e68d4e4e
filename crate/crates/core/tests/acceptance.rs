//! Acceptance criteria. Each check prints one `[PASS]` or `[FAIL]` line and
//! the test fails at the end if any check failed, so a single run reports
//! every criterion.

use std::fs;
use std::ops::{Add, Mul};
use std::time::Instant;

use vsg_bess::dynamics::{simulate, SimConfig, Trace};
use vsg_bess::export::{export, SummaryFormat};
use vsg_bess::integrate::{rk4_step, OdeState};
use vsg_bess::metrics::extrema;
use vsg_bess::scenario::{run_scenario, run_sweep, Preset, RowValues, SweepResult};
use vsg_bess::sizing::{energy_split, ROCOF_LIMIT};
use vsg_bess::{BaseQuantities, GridParams, VsgParams};

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id}: {detail}");
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn row(r: &SweepResult, t_a: f64, k_d: f64, k_omega: f64) -> &RowValues {
    r.values(t_a, k_d, k_omega)
        .unwrap_or_else(|| panic!("missing row t_a={t_a} k_d={k_d} k_omega={k_omega}"))
}

fn max_dev(v: &RowValues) -> f64 {
    (v.f_max - 60.0).max(60.0 - v.f_min)
}

const GAINS: [(f64, f64); 4] = [(400.0, 20.0), (400.0, 40.0), (0.0, 20.0), (0.0, 40.0)];

fn inertia_trend(rep: &mut Report) -> (SweepResult, SweepResult) {
    let t0 = Instant::now();
    let t1 = run_sweep(&Preset::Table1.scenarios()).unwrap().result;
    let t2 = run_sweep(&Preset::Table2.scenarios()).unwrap().result;
    let elapsed = t0.elapsed().as_secs_f64();
    let mut ok = true;
    let mut detail = Vec::new();
    for (k_d, k_omega) in GAINS {
        let (a, b) = (row(&t1, 4.0, k_d, k_omega), row(&t2, 10.0, k_d, k_omega));
        ok &= b.rocof_max < a.rocof_max;
        detail.push(format!("{:.3}->{:.3}", a.rocof_max, b.rocof_max));
    }
    rep.check(
        "1 inertia trend",
        ok,
        format!("rocof t_a 4->10: {}", detail.join(", ")),
    );
    // debug builds are several times slower than release
    let budget = if cfg!(debug_assertions) { 60.0 } else { 10.0 };
    rep.check(
        "1 runtime",
        elapsed < budget,
        format!("8 runs in {elapsed:.2} s (budget {budget} s)"),
    );
    (t1, t2)
}

fn damping_trend(rep: &mut Report, tables: &[(f64, &SweepResult)]) {
    let mut ok = true;
    let mut detail = Vec::new();
    for &(t_a, r) in tables {
        for k_omega in [20.0, 40.0] {
            let (d, u) = (row(r, t_a, 400.0, k_omega), row(r, t_a, 0.0, k_omega));
            ok &= u.f_min < d.f_min && u.f_max > d.f_max && u.rocof_max > d.rocof_max;
            detail.push(format!(
                "t_a {t_a} k_w {k_omega}: [{:.3},{:.3}]/{:.3} vs [{:.3},{:.3}]/{:.3}",
                d.f_min, d.f_max, d.rocof_max, u.f_min, u.f_max, u.rocof_max
            ));
        }
    }
    rep.check("2 damping trend", ok, detail.join("; "));
}

fn droop_trend(rep: &mut Report, tables: &[(f64, &SweepResult)]) {
    let mut ok = true;
    let mut detail = Vec::new();
    for &(t_a, r) in tables {
        for k_d in [400.0, 0.0] {
            let (lo, hi) = (row(r, t_a, k_d, 20.0), row(r, t_a, k_d, 40.0));
            ok &= max_dev(hi) < max_dev(lo) && hi.discharge_peak <= lo.discharge_peak;
            detail.push(format!(
                "t_a {t_a} k_d {k_d}: dev {:.3}->{:.3}, discharge {:.3}->{:.3}",
                max_dev(lo),
                max_dev(hi),
                lo.discharge_peak,
                hi.discharge_peak
            ));
        }
    }
    rep.check("3 droop trend", ok, detail.join("; "));
}

fn battery_trend(rep: &mut Report, t1: &SweepResult, t2: &SweepResult) {
    let (a, b) = (row(t1, 4.0, 400.0, 20.0), row(t2, 10.0, 400.0, 20.0));
    rep.check(
        "4 battery vs inertia",
        b.charge_peak >= a.charge_peak && b.power_range >= a.power_range,
        format!(
            "charge {:.3}->{:.3}, range {:.3}->{:.3}",
            a.charge_peak, b.charge_peak, a.power_range, b.power_range
        ),
    );
}

fn rocof_compliance(rep: &mut Report, t1: &SweepResult, t2: &SweepResult) {
    let undamped: Vec<&RowValues> = [(4.0, t1), (10.0, t2)]
        .iter()
        .flat_map(|&(t_a, r)| [20.0, 40.0].map(|k_omega| row(r, t_a, 0.0, k_omega)))
        .collect();
    let damped = [20.0, 40.0].map(|k_omega| row(t2, 10.0, 400.0, k_omega));
    let some_violate = undamped.iter().any(|v| !v.compliant);
    let all_comply = damped.iter().all(|v| v.compliant);
    let flags_agree = undamped
        .iter()
        .chain(&damped)
        .all(|v| v.compliant == (v.rocof_max <= ROCOF_LIMIT));
    rep.check(
        "5 rocof compliance",
        some_violate && all_comply && flags_agree,
        format!(
            "k_d=0 rocof {:?}, k_d=400/t_a=10 rocof {:?}",
            undamped
                .iter()
                .map(|v| round3(v.rocof_max))
                .collect::<Vec<_>>(),
            damped
                .iter()
                .map(|v| round3(v.rocof_max))
                .collect::<Vec<_>>()
        ),
    );
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Dense midpoint rule on the piecewise-linear interpolant of the samples,
/// returning `(negative area magnitude, positive area)`.
fn dense_oracle(p: &[f64], dt: f64, sub: usize) -> (f64, f64) {
    let h = dt / sub as f64;
    let (mut neg, mut pos) = (0.0, 0.0);
    for w in p.windows(2) {
        for j in 0..sub {
            let s = (j as f64 + 0.5) / sub as f64;
            let v = w[0] + (w[1] - w[0]) * s;
            if v < 0.0 {
                neg -= v * h;
            } else {
                pos += v * h;
            }
        }
    }
    (neg, pos)
}

fn synthetic(dt: f64, t_end: f64, p: impl Fn(f64) -> f64) -> Trace {
    let n = (t_end / dt).round() as usize;
    let pb: Vec<f64> = (0..=n).map(|k| p(k as f64 * dt)).collect();
    Trace::from_frequency_and_battery(dt, 60.0, vec![60.0; n + 1], pb).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn quadrature_oracle(rep: &mut Report) {
    let dt = 1e-3;
    let mut worst = 0.0f64;
    // trapezoidal pulse: +0.3 pu discharge, then a -0.5 pu charge
    let pulse = |t: f64| {
        let ramp = |t: f64, a: f64, b: f64| ((t - a) / (b - a)).clamp(0.0, 1.0);
        0.3 * (ramp(t, 0.2, 0.25) - ramp(t, 0.8, 0.85))
            - 0.5 * (ramp(t, 1.1, 1.2) - ramp(t, 1.6, 1.7))
    };
    let sine = |t: f64| 0.6 * (2.0 * std::f64::consts::PI * 0.37 * t + 0.3).sin();
    let cases: [(&str, &dyn Fn(f64) -> f64); 2] = [("pulse", &pulse), ("sinusoid", &sine)];
    for (_, f) in cases {
        let tr = synthetic(dt, 7.0, f);
        let got = energy_split(&tr, 0.0, 7.0).unwrap();
        let (neg, pos) = dense_oracle(tr.p_bess(), dt, 256);
        worst = worst.max(rel(got.stored, neg)).max(rel(got.delivered, pos));
    }
    rep.check(
        "6 quadrature vs dense oracle",
        worst < 1e-6,
        format!("worst relative difference {worst:.2e} (pulse, sinusoid)"),
    );

    // analytic areas of the sinusoid converge at second order in the step
    let w = 2.0 * std::f64::consts::PI;
    let exact = 2.0 / w * 0.6; // one full period: each lobe holds 0.6 * 2/w
    let err = |dt: f64| {
        let tr = synthetic(dt, 1.0, |t| 0.6 * (w * t).sin());
        let e = energy_split(&tr, 0.0, 1.0).unwrap();
        (e.delivered - exact).abs().max((e.stored - exact).abs())
    };
    let (e1, e2) = (err(2e-3), err(1e-3));
    let order = (e1 / e2).log2();
    rep.check(
        "6 quadrature vs analytic",
        (1.8..2.2).contains(&order) && e2 < 1e-5 * exact,
        format!("errors {e1:.2e}, {e2:.2e}, order {order:.2}"),
    );

    // simulated trace: successive subsamples shrink the total by ~4x
    let mut s = Preset::Table1.scenarios().remove(2);
    s.t_end = 31.0;
    let tr = run_scenario(&s).unwrap().trace;
    let sub = |stride: usize| {
        let f: Vec<f64> = tr.f_pcc().iter().step_by(stride).copied().collect();
        let p: Vec<f64> = tr.p_bess().iter().step_by(stride).copied().collect();
        let t = Trace::from_frequency_and_battery(tr.dt() * stride as f64, 60.0, f, p).unwrap();
        energy_split(&t, 1.0, 31.0).unwrap().total()
    };
    let (a, b, c) = (sub(1), sub(2), sub(4));
    let ratio = (c - b) / (b - a);
    rep.check(
        "6 quadrature on simulated trace",
        (3.0..5.0).contains(&ratio),
        format!("E(h)={a:.6}, E(2h)={b:.6}, E(4h)={c:.6}, difference ratio {ratio:.2}"),
    );
}

#[derive(Clone, Copy)]
struct Osc(f64, f64);

impl Add for Osc {
    type Output = Osc;
    fn add(self, o: Osc) -> Osc {
        Osc(self.0 + o.0, self.1 + o.1)
    }
}

impl Mul<f64> for Osc {
    type Output = Osc;
    fn mul(self, s: f64) -> Osc {
        Osc(self.0 * s, self.1 * s)
    }
}

impl OdeState for Osc {
    fn is_finite(&self) -> bool {
        self.0.is_finite() && self.1.is_finite()
    }
}

fn integrator_convergence(rep: &mut Report) {
    let vsg = VsgParams::default();
    let grid = GridParams::default();
    let base = BaseQuantities::default();
    let events = [vsg_bess::scenario::standard_contingency(&grid)];
    let ext = |dt| {
        let cfg = SimConfig {
            dt,
            ..SimConfig::default()
        };
        extrema(&simulate(&vsg, &grid, &base, &events, &cfg).unwrap()).unwrap()
    };
    let (a, b) = (ext(1e-3), ext(5e-4));
    let d = (a.0 - b.0).abs().max((a.1 - b.1).abs());
    rep.check(
        "7 step halving",
        d < 1e-4,
        format!("f_min/f_max shift {d:.2e} Hz"),
    );

    // damped oscillator x'' + 2 z w x' + w^2 x = 0 against its closed form
    let (w, z): (f64, f64) = (3.0, 0.1);
    let wd = w * (1.0 - z * z).sqrt();
    let exact = |t: f64| (-z * w * t).exp() * ((wd * t).cos() + z * w / wd * (wd * t).sin());
    let t_end = 4.0;
    let err = |n: usize| {
        let h = t_end / n as f64;
        let mut x = Osc(1.0, 0.0);
        for _ in 0..n {
            x = rk4_step(x, h, |s: Osc| Osc(s.1, -2.0 * z * w * s.1 - w * w * s.0)).unwrap();
        }
        (x.0 - exact(t_end)).abs()
    };
    let (e1, e2, e3) = (err(100), err(200), err(400));
    let orders = [(e1 / e2).log2(), (e2 / e3).log2()];
    rep.check(
        "7 convergence order",
        orders.iter().all(|&p| p >= 3.9),
        format!("observed orders {:.3}, {:.3}", orders[0], orders[1]),
    );
}

fn equilibrium(rep: &mut Report) {
    let tr = simulate(
        &VsgParams::default(),
        &GridParams::default(),
        &BaseQuantities::default(),
        &[],
        &SimConfig {
            t_end: 10.0,
            ..SimConfig::default()
        },
    )
    .unwrap();
    let df = tr
        .f_pcc()
        .iter()
        .map(|f| (f - 60.0).abs())
        .fold(0.0, f64::max);
    let dp = tr.p_bess().iter().map(|p| p.abs()).fold(0.0, f64::max);
    rep.check(
        "8 equilibrium",
        df < 1e-9 && dp < 1e-9 && tr.t_end() >= 10.0,
        format!(
            "max |f-60| {df:.1e} Hz, max |p_bess| {dp:.1e} pu over {} s",
            tr.t_end()
        ),
    );
}

fn determinism(rep: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for d in &dirs {
        let run = run_sweep(&Preset::Table1.scenarios()).unwrap();
        let mut written = export(&run, SummaryFormat::Csv, d.path()).unwrap();
        written.sort();
        files.push(written);
    }
    let mut same = files[0].len() == files[1].len() && files[0].len() == 5;
    for (a, b) in files[0].iter().zip(&files[1]) {
        same &= a.file_name() == b.file_name() && fs::read(a).unwrap() == fs::read(b).unwrap();
    }
    rep.check(
        "9 determinism",
        same,
        format!("{} files compared byte for byte", files[0].len()),
    );
}

#[test]
fn acceptance() {
    let mut rep = Report { failed: Vec::new() };
    let (t1, t2) = inertia_trend(&mut rep);
    let tables = [(4.0, &t1), (10.0, &t2)];
    damping_trend(&mut rep, &tables);
    droop_trend(&mut rep, &tables);
    battery_trend(&mut rep, &t1, &t2);
    rocof_compliance(&mut rep, &t1, &t2);
    quadrature_oracle(&mut rep);
    integrator_convergence(&mut rep);
    equilibrium(&mut rep);
    determinism(&mut rep);
    assert!(rep.failed.is_empty(), "failed criteria: {:?}", rep.failed);
}
