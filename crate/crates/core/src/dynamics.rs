//! Continuous-time model of a PV inverter run as a virtual synchronous
//! generator (VSG) against an aggregate grid, and the fixed-step simulator.
//!
//! The VSG side:
//!
//! ```text
//! P_m*  = p_star + k_omega·(omega_star − omega_vsg)        droop
//! P_d   = k_d·(omega_vsg − omega_pll)                      damping
//! P_e   = (e_a·e_t/x_t)·sin(delta)                         link power
//! dω/dt = (P_m* − P_e − P_d) / t_a                         swing
//! ```
//!
//! The grid is a single swing mass with load damping and a first-order
//! governor. The PLL is a first-order lag on grid speed and only feeds the
//! damping term. `delta` is the relative angle between the virtual rotor and
//! the grid, so neither absolute angle is integrated.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{rk4_step, OdeState};
use crate::perunit::{validate, BaseQuantities, GridParams, VsgParams};

/// Where the damping power enters the swing equation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwingForm {
    /// `dω/dt = (P_m* − P_e − P_d) / t_a`.
    #[default]
    Uniform,
    /// `dω/dt = (P_m* − P_e) / t_a − P_d`, damping outside the inertia.
    Literal,
}

/// Link power `(e_a·e_t/x_t)·sin(delta)`.
pub fn electrical_power(delta: f64, e_a: f64, e_t: f64, x_t: f64) -> Result<f64> {
    if !(x_t > 0.0) {
        return Err(Error::domain(format!("x_t must be > 0, got {x_t}")));
    }
    Ok(link_power(delta, e_a, e_t, x_t))
}

#[inline]
fn link_power(delta: f64, e_a: f64, e_t: f64, x_t: f64) -> f64 {
    e_a * e_t / x_t * delta.sin()
}

/// Virtual mechanical power from the droop loop.
#[inline]
pub fn droop_power(p_star: f64, k_omega: f64, omega_star: f64, omega_vsg: f64) -> f64 {
    p_star + k_omega * (omega_star - omega_vsg)
}

/// Damping power from the VSG/PLL speed difference.
#[inline]
pub fn damping_power(k_d: f64, omega_vsg: f64, omega_pll: f64) -> f64 {
    k_d * (omega_vsg - omega_pll)
}

/// Battery power, discharge-positive: whatever the inverter delivers beyond
/// the PV output comes from the battery.
#[inline]
pub fn bess_power(p_inverter: f64, p_pv: f64) -> f64 {
    p_inverter - p_pv
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimState {
    /// VSG speed, pu.
    pub omega_vsg: f64,
    /// VSG angle relative to the grid, rad.
    pub delta: f64,
    /// Aggregate grid speed, pu.
    pub omega_grid: f64,
    /// PLL-tracked grid speed, pu.
    pub omega_pll: f64,
    /// Governor output, pu on the grid base.
    pub p_gov: f64,
}

impl Add for SimState {
    type Output = SimState;

    fn add(self, o: SimState) -> SimState {
        SimState {
            omega_vsg: self.omega_vsg + o.omega_vsg,
            delta: self.delta + o.delta,
            omega_grid: self.omega_grid + o.omega_grid,
            omega_pll: self.omega_pll + o.omega_pll,
            p_gov: self.p_gov + o.p_gov,
        }
    }
}

impl Mul<f64> for SimState {
    type Output = SimState;

    fn mul(self, c: f64) -> SimState {
        SimState {
            omega_vsg: self.omega_vsg * c,
            delta: self.delta * c,
            omega_grid: self.omega_grid * c,
            omega_pll: self.omega_pll * c,
            p_gov: self.p_gov * c,
        }
    }
}

impl OdeState for SimState {
    fn is_finite(&self) -> bool {
        self.omega_vsg.is_finite()
            && self.delta.is_finite()
            && self.omega_grid.is_finite()
            && self.omega_pll.is_finite()
            && self.p_gov.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Magnitude is added to the load.
    LoadStep,
    /// Magnitude is added to the grid generation.
    GenerationStep,
}

/// A rectangular power-imbalance pulse on the grid side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub kind: EventKind,
    /// Signed, pu on the grid base.
    pub magnitude: f64,
    pub t_start: f64,
    /// `None` keeps the event active until the end of the run.
    #[serde(default)]
    pub duration: Option<f64>,
}

impl Event {
    /// Loss of `mw` of load for `duration` seconds.
    pub fn load_loss(mw: f64, grid: &GridParams, t_start: f64, duration: f64) -> Self {
        Event {
            kind: EventKind::LoadStep,
            magnitude: -mw / grid.s_base_mw,
            t_start,
            duration: Some(duration),
        }
    }

    /// Change in net load (load minus generation) while active.
    pub fn load_delta(&self) -> f64 {
        match self.kind {
            EventKind::LoadStep => self.magnitude,
            EventKind::GenerationStep => -self.magnitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start >= 0.0) || !self.t_start.is_finite() {
            return Err(Error::domain(format!(
                "event t_start must be >= 0, got {}",
                self.t_start
            )));
        }
        if !self.magnitude.is_finite() {
            return Err(Error::domain("event magnitude must be finite"));
        }
        if let Some(d) = self.duration {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::domain(format!(
                    "event duration must be > 0, got {d}"
                )));
            }
        }
        Ok(())
    }

    /// Step window `[first, end)` during which the event is active, with
    /// start and stop snapped to the nearest step boundary.
    fn step_window(&self, dt: f64) -> (usize, usize) {
        let first = (self.t_start / dt).round() as usize;
        let end = match self.duration {
            Some(d) => (((self.t_start + d) / dt).round() as usize).max(first + 1),
            None => usize::MAX,
        };
        (first, end)
    }
}

/// Algebraic outputs at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outputs {
    pub p_e: f64,
    pub p_m_star: f64,
    pub p_d: f64,
    pub p_bess: f64,
}

/// Validated parameters plus the quantities fixed at initialization.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub vsg: VsgParams,
    pub grid: GridParams,
    pub base: BaseQuantities,
    pub form: SwingForm,
    p_gen0: f64,
    /// Converts inverter-base pu to grid-base pu.
    power_ratio: f64,
}

impl Model {
    pub fn new(
        vsg: &VsgParams,
        grid: &GridParams,
        base: &BaseQuantities,
        form: SwingForm,
    ) -> Result<Self> {
        let v = validate(vsg, grid, base)?;
        let p_gen0 = v
            .grid
            .p_gen0
            .unwrap_or_else(|| v.grid.balancing_generation(v.vsg.p_star, &v.base));
        Ok(Model {
            vsg: v.vsg,
            grid: v.grid,
            base: v.base,
            form,
            p_gen0,
            power_ratio: v.base.s_base() / v.grid.s_base_mw,
        })
    }

    /// Generation on the grid side at t = 0, pu on the grid base.
    pub fn p_gen0(&self) -> f64 {
        self.p_gen0
    }

    /// Operating point: all speeds at 1 pu, governor at rest and `delta` on
    /// the stable branch where the link carries `p_star`.
    pub fn equilibrium(&self) -> Result<SimState> {
        let p_max = self.vsg.max_link_power();
        let s = self.vsg.p_star / p_max;
        if !(s.abs() < 1.0) {
            return Err(Error::InfeasibleOperatingPoint {
                p_star: self.vsg.p_star,
                p_max,
            });
        }
        Ok(SimState {
            omega_vsg: 1.0,
            delta: s.asin(),
            omega_grid: 1.0,
            omega_pll: 1.0,
            p_gov: 0.0,
        })
    }

    pub fn outputs(&self, x: &SimState) -> Outputs {
        let v = &self.vsg;
        let p_e = link_power(x.delta, v.e_a, v.e_t, v.x_t);
        Outputs {
            p_e,
            p_m_star: droop_power(v.p_star, v.k_omega, v.omega_star, x.omega_vsg),
            p_d: damping_power(v.k_d, x.omega_vsg, x.omega_pll),
            p_bess: bess_power(p_e, v.p_pv),
        }
    }

    /// Time derivative of the state with the net load raised by `load_delta`
    /// (pu on the grid base).
    pub fn derivatives(&self, x: &SimState, load_delta: f64) -> SimState {
        let v = &self.vsg;
        let g = &self.grid;
        let out = self.outputs(x);

        let d_omega_vsg = match self.form {
            SwingForm::Uniform => (out.p_m_star - out.p_e - out.p_d) / v.t_a,
            SwingForm::Literal => (out.p_m_star - out.p_e) / v.t_a - out.p_d,
        };
        let grid_dev = x.omega_grid - 1.0;
        let p_load = g.p_load0 + load_delta;
        let accel =
            self.p_gen0 + x.p_gov + out.p_e * self.power_ratio - p_load - g.d_grid * grid_dev;

        SimState {
            omega_vsg: d_omega_vsg,
            delta: (x.omega_vsg - x.omega_grid) * self.base.omega_base(),
            omega_grid: accel / (2.0 * g.h_grid),
            omega_pll: (x.omega_grid - x.omega_pll) / v.t_pll,
            p_gov: (-grid_dev / g.r_gov - x.p_gov) / g.t_gov,
        }
    }

    /// One RK4 step with the disturbance held over the step.
    pub fn step_rk4(&self, x: &SimState, dt: f64, load_delta: f64) -> Option<SimState> {
        rk4_step(*x, dt, |s| self.derivatives(&s, load_delta))
    }
}

/// Run length, step and swing-equation form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub swing: SwingForm,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_end: 40.0,
            dt: 1e-3,
            swing: SwingForm::Uniform,
        }
    }
}

/// Uniformly sampled output of one run. Sample `k` is taken at `k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    dt: f64,
    f_nominal: f64,
    time: Vec<f64>,
    f_pcc: Vec<f64>,
    omega_vsg: Vec<f64>,
    p_e: Vec<f64>,
    p_m_star: Vec<f64>,
    p_d: Vec<f64>,
    p_bess: Vec<f64>,
    p_pv: Vec<f64>,
}

macro_rules! column {
    ($($name:ident),*) => {
        $(pub fn $name(&self) -> &[f64] { &self.$name })*
    };
}

impl Trace {
    fn with_capacity(dt: f64, f_nominal: f64, n: usize) -> Self {
        Trace {
            dt,
            f_nominal,
            time: Vec::with_capacity(n),
            f_pcc: Vec::with_capacity(n),
            omega_vsg: Vec::with_capacity(n),
            p_e: Vec::with_capacity(n),
            p_m_star: Vec::with_capacity(n),
            p_d: Vec::with_capacity(n),
            p_bess: Vec::with_capacity(n),
            p_pv: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, k: usize, omega_vsg: f64, out: &Outputs, p_pv: f64) {
        self.time.push(k as f64 * self.dt);
        self.f_pcc.push(omega_vsg * self.f_nominal);
        self.omega_vsg.push(omega_vsg);
        self.p_e.push(out.p_e);
        self.p_m_star.push(out.p_m_star);
        self.p_d.push(out.p_d);
        self.p_bess.push(out.p_bess);
        self.p_pv.push(p_pv);
    }

    /// Builds a trace from recorded columns, e.g. one read back from CSV.
    /// The PV column is recovered as `p_e − p_bess`.
    pub fn from_columns(
        dt: f64,
        f_nominal: f64,
        f_pcc: Vec<f64>,
        p_e: Vec<f64>,
        p_bess: Vec<f64>,
        p_m_star: Vec<f64>,
        p_d: Vec<f64>,
    ) -> Result<Self> {
        if !(dt > 0.0) || !(f_nominal > 0.0) {
            return Err(Error::domain("trace dt and nominal frequency must be > 0"));
        }
        let n = f_pcc.len();
        if [p_e.len(), p_bess.len(), p_m_star.len(), p_d.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::domain("trace columns differ in length"));
        }
        Ok(Trace {
            dt,
            f_nominal,
            time: (0..n).map(|k| k as f64 * dt).collect(),
            omega_vsg: f_pcc.iter().map(|f| f / f_nominal).collect(),
            p_pv: p_e.iter().zip(&p_bess).map(|(e, b)| e - b).collect(),
            f_pcc,
            p_e,
            p_m_star,
            p_d,
            p_bess,
        })
    }

    /// Frequency and battery power only; the other power columns are zero
    /// except `p_e`, which mirrors `p_bess` (zero PV).
    pub fn from_frequency_and_battery(
        dt: f64,
        f_nominal: f64,
        f_pcc: Vec<f64>,
        p_bess: Vec<f64>,
    ) -> Result<Self> {
        let n = f_pcc.len();
        if p_bess.len() != n {
            return Err(Error::domain("trace columns differ in length"));
        }
        Self::from_columns(
            dt,
            f_nominal,
            f_pcc,
            p_bess.clone(),
            p_bess,
            vec![0.0; n],
            vec![0.0; n],
        )
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn f_nominal(&self) -> f64 {
        self.f_nominal
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Time of the last sample.
    pub fn t_end(&self) -> f64 {
        self.time.last().copied().unwrap_or(0.0)
    }

    /// Nearest sample index to `t`, or `None` outside the trace.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if self.is_empty() || !t.is_finite() {
            return None;
        }
        let k = (t / self.dt).round();
        (k >= 0.0 && (k as usize) < self.len()).then_some(k as usize)
    }

    column!(time, f_pcc, omega_vsg, p_e, p_m_star, p_d, p_bess, p_pv);
}

/// Runs the model from equilibrium to `config.t_end`.
///
/// Event start and stop times are snapped to the nearest step boundary, so
/// an event may be displaced by up to `dt/2`.
pub fn simulate(
    vsg: &VsgParams,
    grid: &GridParams,
    base: &BaseQuantities,
    events: &[Event],
    config: &SimConfig,
) -> Result<Trace> {
    let SimConfig { t_end, dt, swing } = *config;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::domain(format!("t_end must be > 0, got {t_end}")));
    }
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt must be > 0, got {dt}")));
    }
    let model = Model::new(vsg, grid, base, swing)?;
    if dt > model.vsg.t_pll / 5.0 {
        return Err(Error::domain(format!(
            "dt = {dt} s is too coarse for t_pll = {} s (need dt <= t_pll/5)",
            model.vsg.t_pll
        )));
    }
    for e in events {
        e.validate()?;
    }
    let windows: Vec<(usize, usize, f64)> = events
        .iter()
        .map(|e| {
            let (a, b) = e.step_window(dt);
            (a, b, e.load_delta())
        })
        .collect();

    let steps = (t_end / dt).round() as usize;
    let mut trace = Trace::with_capacity(dt, model.base.f_base(), steps + 1);
    let mut x = model.equilibrium()?;
    let p_pv = model.vsg.p_pv;

    for k in 0..=steps {
        trace.push(k, x.omega_vsg, &model.outputs(&x), p_pv);
        if k == steps {
            break;
        }
        let load_delta: f64 = windows
            .iter()
            .filter(|(a, b, _)| (*a..*b).contains(&k))
            .map(|(_, _, d)| d)
            .sum();
        x = model
            .step_rk4(&x, dt, load_delta)
            .ok_or(Error::IntegrationFault {
                step: k + 1,
                time: (k + 1) as f64 * dt,
            })?;
    }
    Ok(trace)
}
