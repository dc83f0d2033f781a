//! Attempt rate of unmodified DCF with binary exponential backoff.
//!
//! Legacy stations do not pin the attempt rate; it settles where the mean
//! backoff implied by the collision level reproduces the rate:
//!
//! `λ = M / b̄(λ)`, with per-attempt collision probability `p = n̄/(n̄+1)`,
//! stage windows `W_i = min(2^i · CW_min, CW_max)` for `i = 0..=retry_limit`,
//! and `b̄` the mean of `W_i / 2` over attempts, stage `i` being reached with
//! probability `p^i` (the frame is dropped after the last stage).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DAMPING: f64 = 0.5;
pub const CONVERGENCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcfParams {
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
}

impl Default for DcfParams {
    fn default() -> Self {
        DcfParams {
            cw_min: 32,
            cw_max: 1024,
            retry_limit: 7,
        }
    }
}

impl DcfParams {
    pub fn validate(&self) -> Result<()> {
        if self.cw_min < 1 {
            return Err(Error::invalid("policy.cw_min", "must be at least 1"));
        }
        if self.retry_limit < 1 {
            return Err(Error::invalid("policy.retry_limit", "must be at least 1"));
        }
        if self.cw_min > self.cw_max {
            return Err(Error::invalid(
                "policy.cw_max",
                format!("cw_max {} is below cw_min {}", self.cw_max, self.cw_min),
            ));
        }
        let reachable =
            (0..=self.retry_limit).any(|i| (self.cw_min as u64) << i == self.cw_max as u64);
        if !reachable {
            return Err(Error::invalid(
                "policy.cw_max",
                format!(
                    "cw_max {} is not cw_min {} doubled at most {} times",
                    self.cw_max, self.cw_min, self.retry_limit
                ),
            ));
        }
        Ok(())
    }

    /// Window of backoff stage `stage`.
    pub fn window(&self, stage: u32) -> u32 {
        let w = (self.cw_min as u64) << stage.min(32);
        w.min(self.cw_max as u64) as u32
    }
}

/// Mean backoff per attempt when attempts collide with probability `p`.
pub fn mean_backoff(p: f64, params: &DcfParams) -> f64 {
    let mut weight = 1.0;
    let (mut num, mut den) = (0.0, 0.0);
    for stage in 0..=params.retry_limit {
        num += weight * params.window(stage) as f64 / 2.0;
        den += weight;
        weight *= p;
    }
    num / den
}

fn implied_rate(lambda: f64, m: u32, params: &DcfParams) -> Result<f64> {
    let n = crate::analytic::mean_collisions(lambda)?;
    let p = n / (n + 1.0);
    Ok(m as f64 / mean_backoff(p, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegacyRate {
    pub lambda: f64,
    pub iterations: usize,
    /// `|λ - M / b̄(λ)|` at the returned iterate.
    pub residual: f64,
}

/// Damped fixed-point iteration with the default damping.
pub fn legacy_attempt_rate(m: u32, params: &DcfParams) -> Result<LegacyRate> {
    legacy_attempt_rate_damped(m, params, DAMPING)
}

pub fn legacy_attempt_rate_damped(m: u32, params: &DcfParams, damping: f64) -> Result<LegacyRate> {
    if m < 2 {
        return Err(Error::invalid(
            "m",
            format!("need at least 2 stations, got {m}"),
        ));
    }
    params.validate()?;
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::invalid("damping", "must lie in (0, 1]"));
    }
    // zero-collision starting point
    let mut lambda = 2.0 * m as f64 / (params.cw_min as f64 + 1.0);
    for it in 1..=MAX_ITERATIONS {
        let next = implied_rate(lambda, m, params)?;
        let step = next - lambda;
        lambda += damping * step;
        if step.abs() < CONVERGENCE {
            let residual = (implied_rate(lambda, m, params)? - lambda).abs();
            return Ok(LegacyRate {
                lambda,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::Analysis(format!(
        "legacy fixed point for M={m} did not converge in {MAX_ITERATIONS} iterations (last {lambda})"
    )))
}
