use serde::{Deserialize, Serialize};

use crate::abtmac::{AbtmacParams, QosClassSpec};
use crate::error::{Error, Result};
use crate::legacy::DcfParams;
use crate::timing::{AccessMode, TimingParams};

/// Shortest run for which metrics are considered meaningful.
pub const MIN_DURATION: f64 = 1.0e4;
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.05;
pub const DEFAULT_ESTIMATION_WINDOW: u32 = 1000;

/// Where ABTMAC stations get their station-count estimate from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum EstimateSource {
    /// True population times [`SimConfig::estimation_error_factor`].
    Oracle,
    /// `10^{n̄/K'}` from the collisions counted over the last `window`
    /// successes. Starts from the oracle value.
    Measured { window: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    LegacyDcf(DcfParams),
    Abtmac {
        params: AbtmacParams,
        estimate: EstimateSource,
    },
    /// Exponential backoff between explicit window bounds.
    FixedWindow {
        cw_min: u32,
        cw_max: u32,
        retry_limit: u32,
    },
}

impl Policy {
    pub fn abtmac(target_lambda: f64) -> Self {
        Policy::Abtmac {
            params: AbtmacParams::with_target(target_lambda),
            estimate: EstimateSource::Oracle,
        }
    }

    pub fn legacy() -> Self {
        Policy::LegacyDcf(DcfParams::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::LegacyDcf(_) => "legacy",
            Policy::Abtmac { .. } => "abtmac",
            Policy::FixedWindow { .. } => "fixed",
        }
    }

    pub fn retry_limit(&self) -> u32 {
        match self {
            Policy::LegacyDcf(p) => p.retry_limit,
            Policy::Abtmac { params, .. } => params.retry_limit,
            Policy::FixedWindow { retry_limit, .. } => *retry_limit,
        }
    }
}

/// Frame payload lengths in slots, headers excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayloadModel {
    Fixed {
        slots: f64,
    },
    /// Whole slots, geometric on `{1, 2, ...}` with the given mean.
    Geometric {
        mean: f64,
    },
}

impl PayloadModel {
    pub fn fixed(slots: f64) -> Self {
        PayloadModel::Fixed { slots }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            PayloadModel::Fixed { slots } => slots,
            PayloadModel::Geometric { mean } => mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Traffic {
    Saturated,
    /// Frame arrivals per slot at each station.
    Poisson {
        rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub station_count: u32,
    pub mode: AccessMode,
    pub policy: Policy,
    pub payload: PayloadModel,
    pub traffic: Traffic,
    /// slots
    pub duration: f64,
    pub seed: u64,
    /// `k1` in `M̃ = k1 · M` for oracle-estimated ABTMAC.
    pub estimation_error_factor: f64,
    pub warmup_fraction: f64,
    pub timing: TimingParams,
    pub qos: Option<QosClassSpec>,
}

impl SimConfig {
    /// Saturated cell with default timing and no estimation error.
    pub fn saturated(station_count: u32, mode: AccessMode, policy: Policy, payload: f64) -> Self {
        SimConfig {
            station_count,
            mode,
            policy,
            payload: PayloadModel::fixed(payload),
            traffic: Traffic::Saturated,
            duration: 1.0e6,
            seed: 1,
            estimation_error_factor: 1.0,
            warmup_fraction: DEFAULT_WARMUP_FRACTION,
            timing: TimingParams::default(),
            qos: None,
        }
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.timing.validate()?;
        if self.station_count < 1 {
            return Err(Error::invalid("sim.station_count", "must be at least 1"));
        }
        if !(self.duration >= MIN_DURATION && self.duration.is_finite()) {
            return Err(Error::invalid(
                "sim.duration",
                format!(
                    "must be at least {MIN_DURATION} slots, got {}",
                    self.duration
                ),
            ));
        }
        if !(self.warmup_fraction >= 0.0 && self.warmup_fraction < 1.0) {
            return Err(Error::invalid("sim.warmup_fraction", "must lie in [0, 1)"));
        }
        if !(self.estimation_error_factor > 0.0 && self.estimation_error_factor.is_finite()) {
            return Err(Error::invalid(
                "sim.estimation_error_factor",
                format!("must be positive, got {}", self.estimation_error_factor),
            ));
        }
        match self.payload {
            PayloadModel::Fixed { slots } if !(slots > 0.0 && slots.is_finite()) => {
                return Err(Error::invalid(
                    "sim.payload",
                    format!("must be positive, got {slots}"),
                ))
            }
            PayloadModel::Geometric { mean } if !(mean >= 1.0 && mean.is_finite()) => {
                return Err(Error::invalid(
                    "sim.payload_mean",
                    format!("geometric mean must be at least 1 slot, got {mean}"),
                ))
            }
            _ => {}
        }
        if let Traffic::Poisson { rate } = self.traffic {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::invalid(
                    "sim.poisson_rate",
                    format!("must be positive, got {rate}"),
                ));
            }
        }
        match &self.policy {
            Policy::LegacyDcf(p) => p.validate()?,
            Policy::Abtmac { params, estimate } => {
                params.validate()?;
                if let EstimateSource::Measured { window } = estimate {
                    if *window == 0 {
                        return Err(Error::invalid(
                            "policy.estimation_window",
                            "must be positive",
                        ));
                    }
                }
            }
            Policy::FixedWindow {
                cw_min,
                cw_max,
                retry_limit,
            } => {
                if cw_min > cw_max {
                    return Err(Error::invalid("policy.cw_max", "must not be below cw_min"));
                }
                if *retry_limit < 1 {
                    return Err(Error::invalid("policy.retry_limit", "must be at least 1"));
                }
            }
        }
        if let Some(qos) = &self.qos {
            if !matches!(self.policy, Policy::Abtmac { .. }) {
                return Err(Error::invalid(
                    "qos",
                    "service classes need the abtmac policy",
                ));
            }
            qos.validate(self.station_count)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimConfig {
        SimConfig::saturated(10, AccessMode::RtsCts, Policy::abtmac(0.7), 34.0)
    }

    fn field_of(c: &SimConfig) -> String {
        match c.validate() {
            Err(Error::InvalidParameter { field, .. }) => field,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn default_is_valid() {
        base().validate().unwrap();
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of(&base().with_duration(100.0)), "sim.duration");
        let mut c = base();
        c.station_count = 0;
        assert_eq!(field_of(&c), "sim.station_count");
        let mut c = base();
        c.payload = PayloadModel::fixed(-3.0);
        assert_eq!(field_of(&c), "sim.payload");
        let mut c = base();
        c.traffic = Traffic::Poisson { rate: 0.0 };
        assert_eq!(field_of(&c), "sim.poisson_rate");
        let mut c = base();
        c.estimation_error_factor = 0.0;
        assert_eq!(field_of(&c), "sim.estimation_error_factor");
        let mut c = base();
        c.policy = Policy::FixedWindow {
            cw_min: 8,
            cw_max: 4,
            retry_limit: 7,
        };
        assert_eq!(field_of(&c), "policy.cw_max");
    }
}
