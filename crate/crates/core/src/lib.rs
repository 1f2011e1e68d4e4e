//! Reduced-order frequency dynamics of a PV inverter controlled as a virtual
//! synchronous generator (VSG), and sizing of the battery that makes the
//! emulated inertia possible.
//!
//! The crate is organised around the runnable programs in `examples/`:
//!
//! ```bash
//! cargo run --release -p vsg-bess --example contingency
//! cargo run --release -p vsg-bess --example table_sweep
//! ```
//!
//! | module       | contents                                                  |
//! |--------------|-----------------------------------------------------------|
//! | [`perunit`]  | bases, parameter containers, validation                   |
//! | [`integrate`]| fixed-step RK4                                            |
//! | [`dynamics`] | swing/droop/damping laws, grid model, [`simulate`]        |
//! | [`metrics`]  | ROCOF, extrema, settling, battery peaks                   |
//! | [`sizing`]   | energy split, first-swing energy, ROCOF check, report     |
//! | [`scenario`] | configs, the damping/droop matrices, parallel sweeps      |
//! | [`export`]   | summary and trace CSV, text tables                        |

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod export;
pub mod integrate;
pub mod metrics;
pub mod perunit;
pub mod scenario;
pub mod sizing;

pub use dynamics::{simulate, Event, EventKind, SimConfig, SimState, SwingForm, Trace};
pub use error::{Error, Result};
pub use metrics::FrequencyMetrics;
pub use perunit::{validate, BaseQuantities, GridParams, VsgParams};
pub use scenario::{load_config, run_scenario, run_sweep, Preset, Scenario, SweepResult, SweepRun};
pub use sizing::{build_report, SizingOptions, SizingReport};
