use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timing::AccessMode;

use super::config::{EstimateSource, Policy, SimConfig, Traffic};
use super::replicate::{run_replicated, Estimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilizationRow {
    pub policy: String,
    pub mode: AccessMode,
    pub station_count: u32,
    pub payload: f64,
    pub slot_utilization: Estimate,
    pub normalized_throughput: Estimate,
}

/// Slot utilization for each saturated scenario of the grid, in grid order.
pub fn slot_utilization_report(
    grid: &[SimConfig],
    replications: u32,
) -> Result<Vec<UtilizationRow>> {
    grid.iter()
        .map(|cfg| {
            if !matches!(cfg.traffic, Traffic::Saturated) {
                return Err(Error::invalid(
                    "sim.traffic",
                    "utilization report needs saturated traffic",
                ));
            }
            let r = run_replicated(cfg, replications)?;
            Ok(UtilizationRow {
                policy: cfg.policy.name().to_string(),
                mode: cfg.mode,
                station_count: cfg.station_count,
                payload: cfg.payload.mean(),
                slot_utilization: r.slot_utilization,
                normalized_throughput: r.normalized_throughput,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationRow {
    /// `M̃ / M`
    pub ratio: f64,
    pub normalized_throughput: Estimate,
    pub throughput_bps: Estimate,
    /// relative to the row with ratio 1
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayloadRow {
    pub payload: f64,
    pub normalized_throughput: Estimate,
    pub throughput_bps: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub estimation: Vec<EstimationRow>,
    pub payload: Vec<PayloadRow>,
}

/// Throughput under station-count estimation errors and under payload
/// changes, both around `base`. A ratio of 1 is always simulated as the
/// reference even when absent from `ratios`.
pub fn sensitivity_suite(
    base: &SimConfig,
    ratios: &[f64],
    payloads: &[f64],
    replications: u32,
) -> Result<SensitivityTable> {
    match base.policy {
        Policy::Abtmac {
            estimate: EstimateSource::Oracle,
            ..
        } => {}
        _ => {
            return Err(Error::invalid(
                "policy",
                "sensitivity runs need the abtmac policy with the oracle estimate",
            ))
        }
    }
    let reference = run_replicated(
        &SimConfig {
            estimation_error_factor: 1.0,
            ..base.clone()
        },
        replications,
    )?;
    let reference_tp = reference.normalized_throughput.mean;
    let mut estimation = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let r = if ratio == 1.0 {
            reference.clone()
        } else {
            run_replicated(
                &SimConfig {
                    estimation_error_factor: ratio,
                    ..base.clone()
                },
                replications,
            )?
        };
        estimation.push(EstimationRow {
            ratio,
            change: r.normalized_throughput.mean / reference_tp - 1.0,
            normalized_throughput: r.normalized_throughput,
            throughput_bps: r.throughput_bps,
        });
    }
    let mut payload = Vec::with_capacity(payloads.len());
    for &x in payloads {
        let mut cfg = base.clone();
        cfg.estimation_error_factor = 1.0;
        cfg.payload = super::config::PayloadModel::fixed(x);
        let r = run_replicated(&cfg, replications)?;
        payload.push(PayloadRow {
            payload: x,
            normalized_throughput: r.normalized_throughput,
            throughput_bps: r.throughput_bps,
        });
    }
    Ok(SensitivityTable {
        estimation,
        payload,
    })
}
