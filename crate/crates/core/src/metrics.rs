//! Frequency and battery-power metrics of a [`Trace`].

use serde::Serialize;

use crate::dynamics::Trace;
use crate::error::{Error, Result};

/// Default ROCOF measurement window, s.
pub const DEFAULT_ROCOF_WINDOW: f64 = 0.1;
/// Default settling band around nominal, Hz.
pub const DEFAULT_SETTLING_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyMetrics {
    pub f_min: f64,
    pub f_max: f64,
    /// Largest absolute windowed slope, Hz/s.
    pub rocof_max: f64,
    pub settling_time: Option<f64>,
    /// Largest battery absorption, reported positive, pu.
    pub charge_peak: f64,
    /// Largest battery supply, pu.
    pub discharge_peak: f64,
    pub power_range: f64,
}

impl FrequencyMetrics {
    pub fn from_trace(trace: &Trace, rocof_window: f64, band: f64, t_event: f64) -> Result<Self> {
        let (f_min, f_max) = extrema(trace)?;
        let (charge_peak, discharge_peak) = battery_peaks(trace);
        Ok(FrequencyMetrics {
            f_min,
            f_max,
            rocof_max: rocof(trace, rocof_window)?,
            settling_time: settling_time(trace, band, t_event)?,
            charge_peak,
            discharge_peak,
            power_range: charge_peak + discharge_peak,
        })
    }

    /// Largest deviation from `f_nominal` in either direction.
    pub fn max_deviation(&self, f_nominal: f64) -> f64 {
        (self.f_max - f_nominal).max(f_nominal - self.f_min)
    }
}

/// Rate of change of frequency: the largest `|f(t + w) − f(t)| / w` over all
/// window positions. The window is rounded to a whole number of samples.
pub fn rocof(trace: &Trace, window: f64) -> Result<f64> {
    let dt = trace.dt();
    if !(window >= dt * (1.0 - 1e-9)) {
        return Err(Error::domain(format!(
            "rocof window {window} s is shorter than the step {dt} s"
        )));
    }
    let w = ((window / dt).round() as usize).max(1);
    let f = trace.f_pcc();
    if f.len() <= w {
        return Err(Error::domain(format!(
            "trace of {} samples is shorter than the {window} s rocof window",
            f.len()
        )));
    }
    let span = w as f64 * dt;
    Ok(f.iter()
        .zip(&f[w..])
        .map(|(a, b)| (b - a).abs())
        .fold(0.0, f64::max)
        / span)
}

pub fn extrema(trace: &Trace) -> Result<(f64, f64)> {
    let f = trace.f_pcc();
    if f.is_empty() {
        return Err(Error::domain("extrema of an empty trace"));
    }
    Ok(f.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        }))
}

/// `(charge_peak, discharge_peak)`, both non-negative.
pub fn battery_peaks(trace: &Trace) -> (f64, f64) {
    let (lo, hi) = trace
        .p_bess()
        .iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    (-lo, hi)
}

/// First time at or after `t_event` from which the frequency stays within
/// `band` of nominal until the end of the trace.
pub fn settling_time(trace: &Trace, band: f64, t_event: f64) -> Result<Option<f64>> {
    if !(band > 0.0) {
        return Err(Error::domain(format!(
            "settling band must be > 0, got {band}"
        )));
    }
    let k0 = trace
        .index_of(t_event)
        .ok_or_else(|| Error::domain(format!("t_event {t_event} s is outside the trace")))?;
    let f0 = trace.f_nominal();
    let f = &trace.f_pcc()[k0..];
    match f.iter().rposition(|x| (x - f0).abs() > band) {
        None => Ok(Some(trace.time()[k0])),
        Some(j) if k0 + j + 1 < trace.len() => Ok(Some(trace.time()[k0 + j + 1])),
        Some(_) => Ok(None),
    }
}

/// Amplitude of the largest excursion opposite to the first one, i.e. the
/// backswing after the first frequency peak. Zero if the frequency never
/// crosses back through nominal.
pub fn backswing(trace: &Trace, t_event: f64) -> Result<f64> {
    let k0 = trace
        .index_of(t_event)
        .ok_or_else(|| Error::domain(format!("t_event {t_event} s is outside the trace")))?;
    let f0 = trace.f_nominal();
    let dev: Vec<f64> = trace.f_pcc()[k0..].iter().map(|f| f - f0).collect();
    let Some(first) = dev.iter().copied().find(|d| *d != 0.0) else {
        return Ok(0.0);
    };
    let sign = first.signum();
    let Some(cross) = dev.iter().position(|d| d * sign < 0.0) else {
        return Ok(0.0);
    };
    Ok(dev[cross..].iter().map(|d| -d * sign).fold(0.0, f64::max))
}
