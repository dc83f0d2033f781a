use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

use super::config::SimConfig;
use super::engine::run;
use super::metrics::SimMetrics;

/// Sample mean with the half-width of its two-sided 95% Student-t interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Estimate {
                mean,
                half_width: f64::NAN,
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .map(|d| d.inverse_cdf(0.975))
            .unwrap_or(f64::NAN);
        Estimate {
            mean,
            half_width: t * (var / n as f64).sqrt(),
        }
    }

    pub fn relative_half_width(&self) -> f64 {
        self.half_width / self.mean.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatedMetrics {
    pub replications: u32,
    pub normalized_throughput: Estimate,
    pub throughput_bps: Estimate,
    pub mean_access_delay: Estimate,
    pub station_access_delay: Estimate,
    pub mean_collisions_per_service: Estimate,
    pub collision_probability: Estimate,
    pub slot_utilization: Estimate,
    pub attempt_rate: Estimate,
    pub drops: Estimate,
    pub jain_index: Estimate,
    pub runs: Vec<SimMetrics>,
}

/// Runs `replications` independent copies with seeds `seed, seed + 1, ...`
/// in parallel. Results are ordered by replicate index.
pub fn run_replicated(config: &SimConfig, replications: u32) -> Result<ReplicatedMetrics> {
    if replications < 2 {
        return Err(Error::invalid(
            "sim.replications",
            format!("need at least 2 replications, got {replications}"),
        ));
    }
    config.validate()?;
    let runs = (0..replications)
        .into_par_iter()
        .map(|i| run(&config.clone().with_seed(config.seed.wrapping_add(i as u64))))
        .collect::<Result<Vec<_>>>()?;
    let est = |f: fn(&SimMetrics) -> f64| {
        let xs: Vec<f64> = runs.iter().map(f).collect();
        Estimate::from_samples(&xs)
    };
    Ok(ReplicatedMetrics {
        replications,
        normalized_throughput: est(|m| m.normalized_throughput),
        throughput_bps: est(|m| m.throughput_bps),
        mean_access_delay: est(|m| m.mean_access_delay),
        station_access_delay: est(|m| m.station_access_delay),
        mean_collisions_per_service: est(|m| m.mean_collisions_per_service),
        collision_probability: est(|m| m.collision_probability),
        slot_utilization: est(|m| m.slot_utilization),
        attempt_rate: est(|m| m.attempt_rate),
        drops: est(|m| m.drops as f64),
        jain_index: est(|m| m.jain_index()),
        runs,
    })
}
