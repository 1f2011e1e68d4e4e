//! Per-unit conventions and the parameter containers shared by the simulator,
//! the metrics and the sizing code.
//!
//! Powers on the inverter side are in pu of [`BaseQuantities::s_base`] (the
//! PV/inverter rating). The aggregate grid keeps its own power base,
//! [`GridParams::s_base_mw`]. Speeds are pu of `omega_base` everywhere; Hz only
//! appear at the metrics boundary.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Rating of the PV plant the VSG is built around, MW.
pub const PV_RATING_MW: f64 = 2.75;
/// Total load of the test network, MW. Used as the grid-side power base.
pub const GRID_BASE_MW: f64 = 16.0;
pub const NOMINAL_FREQUENCY_HZ: f64 = 60.0;

/// Power and frequency bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "BaseFields", into = "BaseFields")]
pub struct BaseQuantities {
    s_base: f64,
    f_base: f64,
    omega_base: f64,
}

/// Serialized form of [`BaseQuantities`]; `omega_base` is always derived.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BaseFields {
    s_base: f64,
    f_base: f64,
}

impl Default for BaseFields {
    fn default() -> Self {
        Self {
            s_base: PV_RATING_MW,
            f_base: NOMINAL_FREQUENCY_HZ,
        }
    }
}

impl From<BaseFields> for BaseQuantities {
    fn from(raw: BaseFields) -> Self {
        BaseQuantities::new(raw.s_base, raw.f_base)
    }
}

impl From<BaseQuantities> for BaseFields {
    fn from(base: BaseQuantities) -> Self {
        BaseFields {
            s_base: base.s_base,
            f_base: base.f_base,
        }
    }
}

impl BaseQuantities {
    /// Bases are not checked here; run [`validate`] before use.
    pub fn new(s_base_mw: f64, f_base_hz: f64) -> Self {
        Self {
            s_base: s_base_mw,
            f_base: f_base_hz,
            omega_base: 2.0 * PI * f_base_hz,
        }
    }

    /// Power base in MW.
    pub fn s_base(&self) -> f64 {
        self.s_base
    }

    /// Nominal frequency in Hz.
    pub fn f_base(&self) -> f64 {
        self.f_base
    }

    /// Nominal angular speed in rad/s.
    pub fn omega_base(&self) -> f64 {
        self.omega_base
    }
}

impl Default for BaseQuantities {
    fn default() -> Self {
        BaseFields::default().into()
    }
}

/// Converts a power in MW to pu on `base`.
pub fn to_per_unit(value_mw: f64, base: &BaseQuantities) -> Result<f64, Error> {
    if !value_mw.is_finite() {
        return Err(Error::Validation(vec![Violation::new(
            "value_mw",
            "must be finite",
            value_mw,
        )]));
    }
    if !(base.s_base > 0.0) {
        return Err(Error::Validation(vec![Violation::new(
            "base.s_base",
            "must be > 0",
            base.s_base,
        )]));
    }
    Ok(value_mw / base.s_base)
}

/// Control constants of the PV inverter run as a virtual synchronous generator.
///
/// `k_d` and `k_omega` are pu power per pu speed on the inverter base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VsgParams {
    /// Virtual inertia time constant (the 2H of a machine), s.
    pub t_a: f64,
    /// Damping factor acting on the VSG/PLL speed difference.
    pub k_d: f64,
    /// Droop gain acting on the speed error.
    pub k_omega: f64,
    /// External active power reference, pu.
    pub p_star: f64,
    /// Speed reference, pu.
    pub omega_star: f64,
    /// Internal (armature) voltage, pu.
    pub e_a: f64,
    /// Terminal voltage, pu.
    pub e_t: f64,
    /// Link reactance between the virtual rotor and the grid, pu.
    pub x_t: f64,
    /// Time constant of the PLL that feeds the damping term, s.
    pub t_pll: f64,
    /// PV output, pu. Held constant for a whole run.
    pub p_pv: f64,
}

impl Default for VsgParams {
    fn default() -> Self {
        Self {
            t_a: 4.0,
            k_d: 400.0,
            k_omega: 20.0,
            p_star: 1.0,
            omega_star: 1.0,
            e_a: 1.0,
            e_t: 1.0,
            x_t: DEFAULT_X_T,
            t_pll: 0.47,
            p_pv: 1.0,
        }
    }
}

pub(crate) const DEFAULT_X_T: f64 = 0.49;

impl VsgParams {
    /// Peak power the link can carry, `e_a·e_t/x_t`.
    pub fn max_link_power(&self) -> f64 {
        self.e_a * self.e_t / self.x_t
    }
}

/// Aggregate swing, damping and governor constants standing in for the
/// external network. Powers are pu on `s_base_mw`.
///
/// These are calibration knobs, not measured data. The defaults were fitted
/// so the eight-run gain matrix shows the expected trends with some margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    /// Aggregate inertia constant, s.
    pub h_grid: f64,
    /// Frequency-dependent load and machine damping, pu/pu.
    pub d_grid: f64,
    /// Governor droop, pu.
    pub r_gov: f64,
    /// Governor time constant, s.
    pub t_gov: f64,
    /// Load at t = 0, pu.
    pub p_load0: f64,
    /// Grid generation at t = 0, pu. `None` balances the network against the
    /// VSG's initial output.
    pub p_gen0: Option<f64>,
    /// Grid-side power base, MW.
    pub s_base_mw: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            h_grid: 2.6,
            d_grid: 1.7,
            r_gov: 0.005,
            t_gov: 0.11,
            p_load0: 1.0,
            p_gen0: None,
            s_base_mw: GRID_BASE_MW,
        }
    }
}

impl GridParams {
    /// Generation that balances the network when the VSG injects `p_vsg` pu
    /// (inverter base).
    pub fn balancing_generation(&self, p_vsg: f64, base: &BaseQuantities) -> f64 {
        self.p_load0 - p_vsg * base.s_base / self.s_base_mw
    }
}

/// One violated bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Scenario the violation belongs to, when loaded from a sweep.
    pub scenario: Option<String>,
    pub field: &'static str,
    pub bound: &'static str,
    pub value: f64,
}

impl Violation {
    pub fn new(field: &'static str, bound: &'static str, value: f64) -> Self {
        Self {
            scenario: None,
            field,
            bound,
            value,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.scenario {
            write!(f, "[{name}] ")?;
        }
        write!(f, "{} {} (got {})", self.field, self.bound, self.value)
    }
}

/// A parameter set that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validated {
    pub vsg: VsgParams,
    pub grid: GridParams,
    pub base: BaseQuantities,
}

/// Relative tolerance on the initial network balance when `p_gen0` is given.
const BALANCE_TOL: f64 = 1e-9;

/// Checks every invariant and reports all violations at once.
pub fn validate(
    vsg: &VsgParams,
    grid: &GridParams,
    base: &BaseQuantities,
) -> Result<Validated, Error> {
    let mut v = Vec::new();
    let mut check = |ok: bool, field: &'static str, bound: &'static str, value: f64| {
        if !(ok && value.is_finite()) {
            v.push(Violation::new(field, bound, value));
        }
    };

    check(base.s_base > 0.0, "base.s_base", "must be > 0", base.s_base);
    check(base.f_base > 0.0, "base.f_base", "must be > 0", base.f_base);

    check(vsg.t_a > 0.0, "vsg.t_a", "must be > 0", vsg.t_a);
    check(vsg.k_d >= 0.0, "vsg.k_d", "must be >= 0", vsg.k_d);
    check(
        vsg.k_omega >= 0.0,
        "vsg.k_omega",
        "must be >= 0",
        vsg.k_omega,
    );
    check(true, "vsg.p_star", "must be finite", vsg.p_star);
    check(true, "vsg.omega_star", "must be finite", vsg.omega_star);
    check(vsg.e_a > 0.0, "vsg.e_a", "must be > 0", vsg.e_a);
    check(vsg.e_t > 0.0, "vsg.e_t", "must be > 0", vsg.e_t);
    check(vsg.x_t > 0.0, "vsg.x_t", "must be > 0", vsg.x_t);
    check(vsg.t_pll > 0.0, "vsg.t_pll", "must be > 0", vsg.t_pll);
    check(vsg.p_pv >= 0.0, "vsg.p_pv", "must be >= 0", vsg.p_pv);

    check(grid.h_grid > 0.0, "grid.h_grid", "must be > 0", grid.h_grid);
    check(
        grid.d_grid >= 0.0,
        "grid.d_grid",
        "must be >= 0",
        grid.d_grid,
    );
    check(grid.r_gov > 0.0, "grid.r_gov", "must be > 0", grid.r_gov);
    check(grid.t_gov > 0.0, "grid.t_gov", "must be > 0", grid.t_gov);
    check(true, "grid.p_load0", "must be finite", grid.p_load0);
    check(
        grid.s_base_mw > 0.0,
        "grid.s_base_mw",
        "must be > 0",
        grid.s_base_mw,
    );

    // The initial VSG output equals p_star at equilibrium.
    if let Some(p_gen0) = grid.p_gen0 {
        let expected = grid.balancing_generation(vsg.p_star, base);
        let scale = grid.p_load0.abs().max(1.0);
        check(
            (p_gen0 - expected).abs() <= BALANCE_TOL * scale,
            "grid.p_gen0",
            "must balance p_load0 against the VSG output at t = 0",
            p_gen0,
        );
    }

    if v.is_empty() {
        Ok(Validated {
            vsg: *vsg,
            grid: *grid,
            base: *base,
        })
    } else {
        Err(Error::Validation(v))
    }
}

impl Validated {
    /// Re-validates; a validated configuration always passes unchanged.
    pub fn revalidate(&self) -> Result<Validated, Error> {
        validate(&self.vsg, &self.grid, &self.base)
    }
}
