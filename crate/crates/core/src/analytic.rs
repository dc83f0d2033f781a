//! Saturation fluid model of DCF at a fixed network attempt rate.
//!
//! A frame service ("fluid chunk") is zero or more collision periods followed
//! by one success. Attempts are Poisson with rate `lambda` per idle slot, so
//! the number of collisions per service is geometric. The mean idle backoff
//! before every transmission event is taken as `1 / lambda` throughout.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive_rate, Error, Result};
use crate::timing::{AccessMode, SlotDurations};

pub const MAX_LAMBDA: f64 = 5.0;
pub const MAX_PAYLOAD: f64 = 1.0e5;

/// Operating point of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    /// attempts per slot
    pub lambda: f64,
    /// mean payload in slots, headers excluded
    pub payload: f64,
    pub mode: AccessMode,
}

impl ModelPoint {
    pub fn new(lambda: f64, payload: f64, mode: AccessMode) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= MAX_LAMBDA) {
            return Err(Error::invalid(
                "lambda",
                format!("must lie in (0, {MAX_LAMBDA}], got {lambda}"),
            ));
        }
        if !(payload > 0.0 && payload <= MAX_PAYLOAD) {
            return Err(Error::invalid(
                "payload",
                format!("must lie in (0, {MAX_PAYLOAD}], got {payload}"),
            ));
        }
        Ok(ModelPoint {
            lambda,
            payload,
            mode,
        })
    }

    /// Mean idle slots before a transmission event.
    pub fn mean_backoff_gap(&self) -> f64 {
        1.0 / self.lambda
    }
}

/// Model outputs at one [`ModelPoint`]. Lengths and delays are in slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidMetrics {
    pub n_bar: f64,
    pub c_bar: f64,
    pub x_bar: f64,
    pub i_bar: f64,
    pub throughput: f64,
    pub delay: f64,
    pub overhead: f64,
    pub collision_probability: f64,
}

/// Mean number of collisions between two consecutive successes.
///
/// `(1 - e^-λ - λe^-λ) / (λe^-λ)`, evaluated as `(e^λ - 1 - λ) / λ` to keep
/// precision at small rates.
pub fn mean_collisions(lambda: f64) -> Result<f64> {
    require_positive_rate(lambda)?;
    Ok((lambda.exp_m1() - lambda) / lambda)
}

/// Probability that a frame service sees exactly `n` collisions.
pub fn collision_count_pmf(lambda: f64, n: u32) -> Result<f64> {
    require_positive_rate(lambda)?;
    // P[success | some transmission] = λe^-λ / (1 - e^-λ) = λ / (e^λ - 1)
    let p_success = lambda / lambda.exp_m1();
    let q = 1.0 - p_success;
    Ok(p_success * q.powi(n as i32))
}

/// Fraction of transmission events that collide, `n̄ / (n̄ + 1)`.
pub fn collision_probability(lambda: f64) -> Result<f64> {
    let n = mean_collisions(lambda)?;
    Ok(n / (n + 1.0))
}

/// Mean collision period `c̄`: backoff gap plus the collision's busy time.
pub fn collision_period(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    require_positive_rate(pt.lambda)?;
    Ok(pt.mean_backoff_gap() + d.collision_busy(pt.mode, pt.payload))
}

/// Mean successful transmission period `x̄`.
pub fn service_time(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    require_positive_rate(pt.lambda)?;
    Ok(pt.mean_backoff_gap() + pt.payload + d.success_overhead(pt.mode))
}

/// MAC-fluid length `l̄` and inter-fluid idle length `ī`.
///
/// With the backoff gap pinned at `1/λ` the denominator of `l̄` equals `-n̄`,
/// so `l̄` is negative. It is only meaningful inside the throughput
/// expression [`fluid_throughput`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidLengths {
    pub l_bar: f64,
    pub i_bar: f64,
}

pub fn fluid_lengths(pt: &ModelPoint, d: &SlotDurations) -> Result<FluidLengths> {
    let n = mean_collisions(pt.lambda)?;
    let x = service_time(pt, d)?;
    let c = collision_period(pt, d)?;
    let cw = pt.mean_backoff_gap();
    let denom = 1.0 - pt.lambda * cw * (n + 1.0);
    Ok(FluidLengths {
        l_bar: (x + n * c) / denom,
        i_bar: cw + d.difs,
    })
}

/// Throughput assembled from the fluid lengths: payload per chunk times
/// chunks per fluid, over fluid plus idle.
pub fn fluid_throughput(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    let FluidLengths { l_bar, i_bar } = fluid_lengths(pt, d)?;
    let n = mean_collisions(pt.lambda)?;
    let chunk = service_time(pt, d)? + n * collision_period(pt, d)?;
    Ok(pt.payload * (l_bar / chunk) / (l_bar + i_bar))
}

/// Overhead slots per delivered payload: `T = x̄' / (x̄' + overhead)`.
pub fn overhead(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    Ok(throughput_denominator(pt, d)? - pt.payload)
}

fn throughput_denominator(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    let n = mean_collisions(pt.lambda)?;
    let x = service_time(pt, d)?;
    let f = n * collision_period(pt, d)?;
    let cw = pt.mean_backoff_gap();
    let busy_share = 1.0 - pt.lambda * cw * (n + 1.0);
    Ok(x + f + 1.0 / pt.lambda + d.difs * busy_share - cw * (n + 1.0))
}

/// Normalised saturation throughput.
pub fn throughput(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    Ok(pt.payload / throughput_denominator(pt, d)?)
}

/// Mean access delay: `n̄ · c̄ + 1/λ`, i.e. the collision periods plus the
/// final backoff gap before the successful transmission starts.
pub fn mean_access_delay(pt: &ModelPoint, d: &SlotDurations) -> Result<f64> {
    let n = mean_collisions(pt.lambda)?;
    Ok(n * collision_period(pt, d)? + pt.mean_backoff_gap())
}

pub fn evaluate(pt: &ModelPoint, d: &SlotDurations) -> Result<FluidMetrics> {
    let n_bar = mean_collisions(pt.lambda)?;
    Ok(FluidMetrics {
        n_bar,
        c_bar: collision_period(pt, d)?,
        x_bar: service_time(pt, d)?,
        i_bar: fluid_lengths(pt, d)?.i_bar,
        throughput: throughput(pt, d)?,
        delay: mean_access_delay(pt, d)?,
        overhead: overhead(pt, d)?,
        collision_probability: n_bar / (n_bar + 1.0),
    })
}
