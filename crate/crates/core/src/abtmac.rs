//! Adaptive backoff tuning: stations hold the network attempt rate fixed and
//! derive their minimum contention window from an estimate of the number of
//! active stations.
//!
//! Per station:
//!
//! 1. estimate the active population `M̃` (AP announcement or collision count);
//! 2. mean backoff `b̄ = M̃ / λ`;
//! 3. p-persistent transmission probability `P_t = 1 / (b̄ + 1)`;
//! 4. mean window `E[CW] = 2 / P_t - 1`;
//! 5. `CW_min` is the least window with `E[CW] < CW_min · 2^{K log10 M̃}`,
//!    capped at `CW_max`.
//!
//! Binary exponential backoff then runs unchanged between `CW_min` and `CW_max`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::analytic::ModelPoint;
use crate::error::{require_positive_rate, Error, Result};
use crate::timing::{AccessMode, SlotDurations};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbtmacParams {
    /// attempts per slot the network is tuned to
    pub target_lambda: f64,
    /// exponent constant `K` in `2^{K log M}`
    pub k_const: f64,
    /// estimator constant `K'` in `M̃ = 10^{n̄/K'}`
    pub k_prime: f64,
    pub cw_max: u32,
    pub retry_limit: u32,
}

impl Default for AbtmacParams {
    fn default() -> Self {
        AbtmacParams {
            target_lambda: 0.7,
            k_const: 1.0,
            k_prime: 1.0,
            cw_max: 1024,
            retry_limit: 7,
        }
    }
}

impl AbtmacParams {
    pub fn with_target(target_lambda: f64) -> Self {
        AbtmacParams {
            target_lambda,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_lambda > 0.0 && self.target_lambda.is_finite()) {
            return Err(Error::invalid(
                "policy.target_lambda",
                format!("must be positive, got {}", self.target_lambda),
            ));
        }
        if !(self.k_const > 0.0 && self.k_const.is_finite()) {
            return Err(Error::invalid("policy.k_const", "must be positive"));
        }
        if !(self.k_prime > 0.0 && self.k_prime.is_finite()) {
            return Err(Error::invalid("policy.k_prime", "must be positive"));
        }
        if self.cw_max < 1 {
            return Err(Error::invalid("policy.cw_max", "must be at least 1"));
        }
        if self.retry_limit < 1 {
            return Err(Error::invalid("policy.retry_limit", "must be at least 1"));
        }
        Ok(())
    }
}

/// `E[CW] / 2^{K log10 M̃}` before integer rounding.
pub fn cw_min_exact(params: &AbtmacParams, m_est: u32) -> Result<f64> {
    params.validate()?;
    if m_est < 1 {
        return Err(Error::Domain(format!(
            "station estimate must be at least 1, got {m_est}"
        )));
    }
    let m = m_est as f64;
    let mean_backoff = m / params.target_lambda;
    let p_t = 1.0 / (mean_backoff + 1.0);
    let mean_cw = 2.0 / p_t - 1.0;
    Ok(mean_cw / 2f64.powf(params.k_const * m.log10()))
}

/// Minimum contention window for an estimated population `m_est`.
pub fn cw_min(params: &AbtmacParams, m_est: u32) -> Result<u32> {
    let exact = cw_min_exact(params, m_est)?;
    // least integer strictly above the bound
    let w = exact.floor() + 1.0;
    Ok((w.min(params.cw_max as f64) as u32).max(1))
}

/// Active-station estimate from the measured mean collisions per service.
pub fn estimate_active_nodes(measured_mean_collisions: f64, k_prime: f64) -> Result<u32> {
    if !(measured_mean_collisions >= 0.0 && measured_mean_collisions.is_finite()) {
        return Err(Error::Domain(format!(
            "mean collisions must be a finite non-negative number, got {measured_mean_collisions}"
        )));
    }
    if !(k_prime > 0.0 && k_prime.is_finite()) {
        return Err(Error::invalid("k_prime", "must be positive"));
    }
    let m = 10f64.powf(measured_mean_collisions / k_prime).round();
    Ok(m.clamp(1.0, u32::MAX as f64) as u32)
}

/// `K'` that makes the estimator exact for a known population.
pub fn calibrate_k_prime(measured_mean_collisions: f64, true_m: u32) -> Result<f64> {
    if true_m < 2 {
        return Err(Error::invalid(
            "true_m",
            "calibration needs at least 2 stations",
        ));
    }
    if measured_mean_collisions.is_nan() || measured_mean_collisions <= 0.0 {
        return Err(Error::Domain(
            "calibration needs a positive collision count".into(),
        ));
    }
    Ok(measured_mean_collisions / (true_m as f64).log10())
}

/// One service class: `station_count` stations whose mean backoff is
/// `backoff_scale · b̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QosClass {
    pub id: String,
    pub station_count: u32,
    pub backoff_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QosClassSpec {
    pub classes: Vec<QosClass>,
}

impl QosClassSpec {
    pub fn total_stations(&self) -> u32 {
        self.classes.iter().map(|c| c.station_count).sum()
    }

    /// Checks the split against a population of `m` stations.
    pub fn validate(&self, m: u32) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::invalid(
                "qos.classes",
                "at least one class is required",
            ));
        }
        let mut seen = HashSet::new();
        for c in &self.classes {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::invalid(
                    "qos.classes.id",
                    format!("duplicate class `{}`", c.id),
                ));
            }
            if c.station_count == 0 {
                return Err(Error::invalid(
                    "qos.classes.station_count",
                    format!("class `{}` has no stations", c.id),
                ));
            }
            if !(c.backoff_scale > 0.0 && c.backoff_scale.is_finite()) {
                return Err(Error::invalid(
                    "qos.classes.backoff_scale",
                    format!("class `{}` scale must be positive", c.id),
                ));
            }
        }
        if self.total_stations() != m {
            return Err(Error::invalid(
                "qos.classes.station_count",
                format!(
                    "counts sum to {} but the cell has {m} stations",
                    self.total_stations()
                ),
            ));
        }
        let weighted: f64 = self
            .classes
            .iter()
            .map(|c| c.station_count as f64 * c.backoff_scale)
            .sum::<f64>()
            / m as f64;
        if (weighted - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "qos.classes.backoff_scale",
                format!("station-weighted mean scale must be 1, got {weighted}"),
            ));
        }
        Ok(())
    }
}

/// Attempt rates of one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosRate {
    /// Aggregate rate of the class: `count / (scale · b̄)`.
    pub group_rate: f64,
    /// Network rate a cell of such stations would have: `λ / scale`. This is
    /// the rate that enters the per-class delay.
    pub station_equivalent_rate: f64,
}

/// Splits a network attempt rate across service classes, keeping the mean
/// backoff of the cell at `b̄ = m / avg_lambda`.
pub fn qos_rates(
    avg_lambda: f64,
    m: u32,
    spec: &QosClassSpec,
) -> Result<BTreeMap<String, QosRate>> {
    require_positive_rate(avg_lambda)?;
    spec.validate(m)?;
    let mean_backoff = m as f64 / avg_lambda;
    Ok(spec
        .classes
        .iter()
        .map(|c| {
            let rate = QosRate {
                group_rate: c.station_count as f64 / (c.backoff_scale * mean_backoff),
                station_equivalent_rate: avg_lambda / c.backoff_scale,
            };
            (c.id.clone(), rate)
        })
        .collect())
}

/// Access delay seen by a class running at `class_rate` while the cell-wide
/// collision count stays at `network_n_bar`.
pub fn per_class_delay(
    class_rate: f64,
    payload: f64,
    mode: AccessMode,
    network_n_bar: f64,
    d: &SlotDurations,
) -> Result<f64> {
    require_positive_rate(class_rate)?;
    if !(network_n_bar >= 0.0 && network_n_bar.is_finite()) {
        return Err(Error::Domain(format!(
            "network mean collisions must be non-negative, got {network_n_bar}"
        )));
    }
    let gap = 1.0 / class_rate;
    Ok(network_n_bar * (gap + d.collision_busy(mode, payload)) + gap)
}

/// Convenience: per-class delay at the model point's collision level.
pub fn class_delays(
    pt: &ModelPoint,
    m: u32,
    spec: &QosClassSpec,
    d: &SlotDurations,
) -> Result<BTreeMap<String, f64>> {
    let n = crate::analytic::mean_collisions(pt.lambda)?;
    qos_rates(pt.lambda, m, spec)?
        .into_iter()
        .map(|(id, r)| {
            per_class_delay(r.station_equivalent_rate, pt.payload, pt.mode, n, d).map(|v| (id, v))
        })
        .collect()
}
