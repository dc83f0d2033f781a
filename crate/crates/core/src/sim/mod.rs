//! Slotted discrete-event simulator of a single saturated or Poisson-loaded cell.

mod config;
mod engine;
mod experiments;
mod metrics;
mod replicate;

pub use config::{
    EstimateSource, PayloadModel, Policy, SimConfig, Traffic, DEFAULT_ESTIMATION_WINDOW,
    DEFAULT_WARMUP_FRACTION, MIN_DURATION,
};
pub use engine::{run, run_traced, run_with_budget, TimeBudget, RNG_ALGORITHM};
pub use experiments::{
    sensitivity_suite, slot_utilization_report, EstimationRow, PayloadRow, SensitivityTable,
    UtilizationRow,
};
pub use metrics::{jain_index, SimMetrics};
pub use replicate::{run_replicated, Estimate, ReplicatedMetrics};
