//! Battery power and energy ratings from a simulated trace.
//!
//! Energy is the area under the battery power curve over the swing period,
//! split by sign: absorbed energy (charging, `p_bess < 0`) and delivered
//! energy (discharging). Their sum is the energy the battery must be able to
//! cycle. The first-swing energy, from the disturbance to the first reversal
//! of battery power, is reported alongside as a lighter sizing proxy.

use serde::Serialize;

use crate::dynamics::Trace;
use crate::error::{Error, Result};
use crate::metrics::FrequencyMetrics;
use crate::perunit::BaseQuantities;

/// Relay-protection ROCOF limit, Hz/s.
pub const ROCOF_LIMIT: f64 = 0.5;
/// Default integration horizon after the event, s.
pub const DEFAULT_SIZING_HORIZON: f64 = 30.0;
/// Share of the distributed-generation capacity used by the rule-of-thumb
/// battery rating.
pub const RULE_OF_THUMB_SHARE: f64 = 0.1;

/// Battery power magnitudes at or below this are treated as equilibrium
/// round-off when looking for the start of the first swing, pu.
const NOISE_FLOOR: f64 = 1e-12;

/// Absorbed and delivered energy over an interval, pu·s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergySplit {
    pub stored: f64,
    pub delivered: f64,
}

impl EnergySplit {
    /// Total cycled energy.
    pub fn total(&self) -> f64 {
        self.stored + self.delivered
    }
}

/// Signed trapezoid areas of one segment, `(negative part, positive part)`.
/// A segment whose endpoints differ in sign is cut at the linearly
/// interpolated zero.
fn segment(p0: f64, p1: f64, dt: f64) -> (f64, f64) {
    if p0 * p1 < 0.0 {
        let tc = p0 / (p0 - p1) * dt;
        let a0 = 0.5 * p0 * tc;
        let a1 = 0.5 * p1 * (dt - tc);
        if p0 < 0.0 {
            (a0, a1)
        } else {
            (a1, a0)
        }
    } else {
        let a = 0.5 * (p0 + p1) * dt;
        if a < 0.0 {
            (a, 0.0)
        } else {
            (0.0, a)
        }
    }
}

fn interval(trace: &Trace, t0: f64, t1: f64) -> Result<(usize, usize)> {
    let i0 = trace.index_of(t0);
    let i1 = trace.index_of(t1);
    match (i0, i1) {
        (Some(a), Some(b)) if a < b => Ok((a, b)),
        _ => Err(Error::domain(format!(
            "interval [{t0}, {t1}] s is empty or outside the trace [0, {}] s",
            trace.t_end()
        ))),
    }
}

/// Trapezoidal energy split of battery power over `[t0, t1]` (snapped to
/// samples).
pub fn energy_split(trace: &Trace, t0: f64, t1: f64) -> Result<EnergySplit> {
    let (i0, i1) = interval(trace, t0, t1)?;
    let p = &trace.p_bess()[i0..=i1];
    let dt = trace.dt();
    let mut e = EnergySplit::default();
    for w in p.windows(2) {
        let (neg, pos) = segment(w[0], w[1], dt);
        e.stored -= neg;
        e.delivered += pos;
    }
    Ok(e)
}

/// Energy of the first battery-power lobe after an event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstSwing {
    /// Magnitude of the lobe area, pu·s.
    pub energy: f64,
    /// Interpolated time of the first sign reversal; `None` if power never
    /// reversed and the integral ran to the end of the searched span.
    pub crossing: Option<f64>,
}

/// Integrates battery power from `t_event` to its first zero crossing.
pub fn energy_to_first_zero_crossing(trace: &Trace, t_event: f64) -> Result<FirstSwing> {
    first_swing_until(trace, t_event, trace.t_end())
}

fn first_swing_until(trace: &Trace, t_event: f64, t_stop: f64) -> Result<FirstSwing> {
    let k0 = trace
        .index_of(t_event)
        .ok_or_else(|| Error::domain(format!("t_event {t_event} s is outside the trace")))?;
    let k_end = trace
        .index_of(t_stop.min(trace.t_end()))
        .unwrap_or(trace.len() - 1)
        .max(k0);
    let p = &trace.p_bess()[..=k_end];
    let dt = trace.dt();

    let Some(onset) = (k0..=k_end).find(|&k| p[k].abs() > NOISE_FLOOR) else {
        return Ok(FirstSwing {
            energy: 0.0,
            crossing: None,
        });
    };
    let sign = p[onset].signum();

    let mut area = 0.0;
    for k in k0..k_end {
        let (p0, p1) = (p[k], p[k + 1]);
        if k + 1 > onset && p1 * sign <= 0.0 {
            // p0 is on the lobe side (or is onset noise), p1 at or past zero
            let tc = if p1 == 0.0 || p0 == p1 {
                dt
            } else {
                (p0 / (p0 - p1) * dt).clamp(0.0, dt)
            };
            area += 0.5 * p0 * tc;
            return Ok(FirstSwing {
                energy: area.abs(),
                crossing: Some(trace.time()[k] + tc),
            });
        }
        area += 0.5 * (p0 + p1) * dt;
    }
    Ok(FirstSwing {
        energy: area.abs(),
        crossing: None,
    })
}

/// `true` when the measured ROCOF does not exceed `limit`.
pub fn rocof_compliance(rocof_max: f64, limit: f64) -> bool {
    rocof_max <= limit
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizingReport {
    /// Absorbed energy, pu·s.
    pub ess_stored: f64,
    /// Delivered energy, pu·s.
    pub ess_delivered: f64,
    /// Total cycled energy, pu·s.
    pub e_batt: f64,
    /// Energy of the first swing, pu·s.
    pub e_first_swing: f64,
    pub first_swing_crossing: Option<f64>,
    /// Larger of the charge and discharge peaks, pu.
    pub power_rating: f64,
    pub power_rating_mw: f64,
    pub energy_rating_mwh: f64,
    /// Rule-of-thumb rating, 10 % of the DG capacity, MW.
    pub ten_percent_rule_mw: f64,
    pub rocof_compliant: bool,
}

/// Options for [`build_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizingOptions {
    /// Integration horizon after the event, s.
    pub horizon: f64,
    pub rocof_limit: f64,
    /// Installed distributed generation, MW.
    pub dg_capacity_mw: f64,
}

impl Default for SizingOptions {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_SIZING_HORIZON,
            rocof_limit: ROCOF_LIMIT,
            dg_capacity_mw: crate::perunit::PV_RATING_MW,
        }
    }
}

/// Assembles the sizing report for a run disturbed at `t_event`.
///
/// Energies are integrated over `[t_event, t_event + horizon]`, clipped to
/// the trace.
pub fn build_report(
    metrics: &FrequencyMetrics,
    trace: &Trace,
    t_event: f64,
    base: &BaseQuantities,
    opts: &SizingOptions,
) -> Result<SizingReport> {
    if !(opts.horizon > 0.0) {
        return Err(Error::domain(format!(
            "sizing horizon must be > 0, got {}",
            opts.horizon
        )));
    }
    let t1 = (t_event + opts.horizon).min(trace.t_end());
    let split = energy_split(trace, t_event, t1)?;
    let first = first_swing_until(trace, t_event, t1)?;
    let power_rating = metrics.charge_peak.max(metrics.discharge_peak);
    let e_batt = split.total();
    Ok(SizingReport {
        ess_stored: split.stored,
        ess_delivered: split.delivered,
        e_batt,
        e_first_swing: first.energy,
        first_swing_crossing: first.crossing,
        power_rating,
        power_rating_mw: power_rating * base.s_base(),
        energy_rating_mwh: e_batt * base.s_base() / 3600.0,
        ten_percent_rule_mw: RULE_OF_THUMB_SHARE * opts.dg_capacity_mw,
        rocof_compliant: rocof_compliance(metrics.rocof_max, opts.rocof_limit),
    })
}
