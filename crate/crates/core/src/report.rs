//! Sweeps and tables behind the command-line tool. Every row type
//! serializes to one CSV record; column order is field order.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::analytic::{evaluate, ModelPoint};
use crate::design::{
    dominant_pole_distance, optimal_payload, tolerable_ratio_bounds, DEFAULT_DELAY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::legacy::{legacy_attempt_rate, DcfParams};
use crate::sim::{ReplicatedMetrics, SensitivityTable, SimConfig, SimMetrics, RNG_ALGORITHM};
use crate::timing::{AccessMode, SlotDurations, TimingParams};

/// Parses `start:end:step` (inclusive of `end` up to rounding).
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid("lambda", format!("`{s}` is not a number")))
    };
    let (a, b, step) = match parts.as_slice() {
        [v] => {
            let v = num(v)?;
            (v, v, 1.0)
        }
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => {
            return Err(Error::invalid(
                "lambda",
                format!("expected `start:end:step` or a single value, got `{spec}`"),
            ))
        }
    };
    if !(step > 0.0 && step.is_finite()) || b < a || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("lambda", format!("bad sweep `{spec}`")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    // a + i·step rather than accumulation, so 0.1:1.0:0.01 ends on 1.0
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

/// Same for integer ranges: `10:100:10` or `10:100` (step 1).
pub fn parse_int_range(field: &str, spec: &str) -> Result<Vec<u32>> {
    let bad = || Error::invalid(field, format!("bad range `{spec}`"));
    let nums: Vec<u32> = spec
        .split(':')
        .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (a, b, step) = match nums.as_slice() {
        [v] => (*v, *v, 1),
        [a, b] => (*a, *b, 1),
        [a, b, s] => (*a, *b, *s),
        _ => return Err(bad()),
    };
    if step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step as usize).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Slots,
    Micros,
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slots" => Ok(Units::Slots),
            "us" => Ok(Units::Micros),
            other => Err(Error::invalid(
                "units",
                format!("expected `slots` or `us`, got `{other}`"),
            )),
        }
    }
}

impl Units {
    pub fn apply(&self, slots: f64, t: &TimingParams) -> f64 {
        match self {
            Units::Slots => slots,
            Units::Micros => t.slots_to_micros(slots),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Units::Slots => "slots",
            Units::Micros => "us",
        }
    }
}

/// Payload used at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PayloadChoice {
    Fixed(f64),
    /// The collision/idle balanced payload of each rate (basic access only).
    Balanced,
}

impl PayloadChoice {
    fn resolve(&self, lambda: f64, mode: AccessMode, d: &SlotDurations) -> Result<f64> {
        match *self {
            PayloadChoice::Fixed(x) => Ok(x),
            PayloadChoice::Balanced if mode == AccessMode::BasicAccess => {
                optimal_payload(lambda, d)
            }
            PayloadChoice::Balanced => Err(Error::invalid(
                "payload",
                "the balanced payload only exists without RTS/CTS",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub lambda: f64,
    pub mode: String,
    pub payload: f64,
    pub n_bar: f64,
    pub collision_probability: f64,
    pub c_bar: f64,
    pub x_bar: f64,
    pub i_bar: f64,
    pub throughput: f64,
    pub delay: f64,
    pub overhead: f64,
}

/// Fluid-model metrics over a rate grid. Durations are in slots.
pub fn analyze_sweep(
    lambdas: &[f64],
    mode: AccessMode,
    payload: PayloadChoice,
    d: &SlotDurations,
) -> Result<Vec<AnalyzeRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let x = payload.resolve(lambda, mode, d)?;
            let m = evaluate(&ModelPoint::new(lambda, x, mode)?, d)?;
            Ok(AnalyzeRow {
                lambda,
                mode: mode.to_string(),
                payload: x,
                n_bar: m.n_bar,
                collision_probability: m.collision_probability,
                c_bar: m.c_bar,
                x_bar: m.x_bar,
                i_bar: m.i_bar,
                throughput: m.throughput,
                delay: m.delay,
                overhead: m.overhead,
            })
        })
        .collect()
}

impl AnalyzeRow {
    pub fn in_units(mut self, units: Units, t: &TimingParams) -> Self {
        for v in [
            &mut self.c_bar,
            &mut self.x_bar,
            &mut self.i_bar,
            &mut self.delay,
            &mut self.overhead,
        ] {
            *v = units.apply(*v, t);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub lambda: f64,
    pub mode: String,
    pub payload: f64,
    /// 1/slots
    pub pole_distance: f64,
}

pub fn stability_sweep(
    lambdas: &[f64],
    mode: AccessMode,
    payload: PayloadChoice,
    d: &SlotDurations,
) -> Result<Vec<StabilityRow>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let x = payload.resolve(lambda, mode, d)?;
            let r = dominant_pole_distance(&ModelPoint::new(lambda, x, mode)?, d)?;
            Ok(StabilityRow {
                lambda,
                mode: mode.to_string(),
                payload: x,
                pole_distance: r.pole_distance,
            })
        })
        .collect()
}

/// Reference robustness table with RTS/CTS: (λ, delay, max M̃/M, min M̃/M).
pub const REFERENCE_RTS_TABLE: [(f64, f64, f64, f64); 5] = [
    (0.1, 12.06, 1.25, 0.83),
    (0.4, 9.09, 3.0, 0.85),
    (0.5, 10.39, 4.5, 0.89),
    (0.7, 13.81, 9.6, 0.92),
    (1.0, 20.08, 13.8, 0.97),
];

/// Reference table without RTS/CTS:
/// (λ, payload, delay, throughput %, max M̃/M, min M̃/M).
pub const REFERENCE_BASIC_TABLE: [(f64, f64, f64, f64, f64, f64); 5] = [
    (0.31, 58.0, 16.84, 70.34, 4.81, 0.88),
    (0.45, 40.0, 18.11, 61.10, 7.90, 0.90),
    (0.55, 34.0, 19.82, 55.76, 11.00, 0.91),
    (0.6, 32.0, 20.87, 53.41, 12.50, 0.92),
    (0.7, 29.0, 23.49, 48.89, 16.80, 0.92),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtsTableRow {
    pub lambda: f64,
    pub delay: f64,
    pub reference_delay: f64,
    pub delay_delta: f64,
    pub max_ratio: f64,
    pub reference_max_ratio: f64,
    pub max_ratio_delta: f64,
    pub min_ratio: f64,
    pub reference_min_ratio: f64,
    pub min_ratio_delta: f64,
}

pub fn rts_table(d: &SlotDurations) -> Result<Vec<RtsTableRow>> {
    REFERENCE_RTS_TABLE
        .par_iter()
        .map(|&(lambda, pd, pmax, pmin)| {
            // payload does not enter the RTS/CTS delay
            let pt = ModelPoint::new(lambda, 34.0, AccessMode::RtsCts)?;
            let delay = crate::analytic::mean_access_delay(&pt, d)?;
            let b = tolerable_ratio_bounds(&pt, d, DEFAULT_DELAY_TOLERANCE)?;
            Ok(RtsTableRow {
                lambda,
                delay,
                reference_delay: pd,
                delay_delta: delay - pd,
                max_ratio: b.max_ratio,
                reference_max_ratio: pmax,
                max_ratio_delta: b.max_ratio - pmax,
                min_ratio: b.min_ratio,
                reference_min_ratio: pmin,
                min_ratio_delta: b.min_ratio - pmin,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicTableRow {
    pub lambda: f64,
    /// balanced payload, unrounded
    pub payload: f64,
    pub reference_payload: f64,
    pub payload_delta: f64,
    pub delay: f64,
    pub reference_delay: f64,
    pub delay_delta: f64,
    /// delay as a percentage of the payload
    pub delay_per_payload: f64,
    /// percent
    pub throughput: f64,
    pub reference_throughput: f64,
    pub throughput_delta: f64,
    pub max_ratio: f64,
    pub reference_max_ratio: f64,
    pub max_ratio_delta: f64,
    pub min_ratio: f64,
    pub reference_min_ratio: f64,
    pub min_ratio_delta: f64,
}

pub fn basic_table(d: &SlotDurations) -> Result<Vec<BasicTableRow>> {
    REFERENCE_BASIC_TABLE
        .par_iter()
        .map(|&(lambda, px, pd, ptp, pmax, pmin)| {
            let x = optimal_payload(lambda, d)?;
            let pt = ModelPoint::new(lambda, x, AccessMode::BasicAccess)?;
            let m = evaluate(&pt, d)?;
            let b = tolerable_ratio_bounds(&pt, d, DEFAULT_DELAY_TOLERANCE)?;
            let tp = 100.0 * m.throughput;
            Ok(BasicTableRow {
                lambda,
                payload: x,
                reference_payload: px,
                payload_delta: x - px,
                delay: m.delay,
                reference_delay: pd,
                delay_delta: m.delay - pd,
                delay_per_payload: 100.0 * m.delay / x,
                throughput: tp,
                reference_throughput: ptp,
                throughput_delta: tp - ptp,
                max_ratio: b.max_ratio,
                reference_max_ratio: pmax,
                max_ratio_delta: b.max_ratio - pmax,
                min_ratio: b.min_ratio,
                reference_min_ratio: pmin,
                min_ratio_delta: b.min_ratio - pmin,
            })
        })
        .collect()
}

/// Legacy DCF at its self-consistent rate against ABTMAC at the recommended
/// rates, both through the fluid model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub station_count: u32,
    pub payload: f64,
    pub legacy_lambda: f64,
    pub legacy_iterations: usize,
    pub legacy_residual: f64,
    pub legacy_n_bar: f64,
    pub legacy_throughput_rts: f64,
    pub legacy_delay_rts: f64,
    pub legacy_throughput_basic: f64,
    pub legacy_delay_basic: f64,
    pub abtmac_n_bar_rts: f64,
    pub abtmac_throughput_rts: f64,
    pub abtmac_delay_rts: f64,
    pub abtmac_n_bar_basic: f64,
    pub abtmac_throughput_basic: f64,
    pub abtmac_delay_basic: f64,
}

pub fn baseline_sweep(
    stations: &[u32],
    payload: f64,
    params: &DcfParams,
    d: &SlotDurations,
) -> Result<Vec<BaselineRow>> {
    let rts_rate = crate::design::recommended_rate(AccessMode::RtsCts).0;
    let basic_rate = crate::design::recommended_rate(AccessMode::BasicAccess).0;
    let abt_rts = evaluate(&ModelPoint::new(rts_rate, payload, AccessMode::RtsCts)?, d)?;
    let abt_basic = evaluate(
        &ModelPoint::new(basic_rate, payload, AccessMode::BasicAccess)?,
        d,
    )?;
    stations
        .par_iter()
        .map(|&m| {
            let r = legacy_attempt_rate(m, params)?;
            let rts = evaluate(&ModelPoint::new(r.lambda, payload, AccessMode::RtsCts)?, d)?;
            let basic = evaluate(
                &ModelPoint::new(r.lambda, payload, AccessMode::BasicAccess)?,
                d,
            )?;
            Ok(BaselineRow {
                station_count: m,
                payload,
                legacy_lambda: r.lambda,
                legacy_iterations: r.iterations,
                legacy_residual: r.residual,
                legacy_n_bar: rts.n_bar,
                legacy_throughput_rts: rts.throughput,
                legacy_delay_rts: rts.delay,
                legacy_throughput_basic: basic.throughput,
                legacy_delay_basic: basic.delay,
                abtmac_n_bar_rts: abt_rts.n_bar,
                abtmac_throughput_rts: abt_rts.throughput,
                abtmac_delay_rts: abt_rts.delay,
                abtmac_n_bar_basic: abt_basic.n_bar,
                abtmac_throughput_basic: abt_basic.throughput,
                abtmac_delay_basic: abt_basic.delay,
            })
        })
        .collect()
}

/// One simulation replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub replicate: u32,
    pub seed: u64,
    pub rng: String,
    pub policy: String,
    pub mode: String,
    pub station_count: u32,
    pub payload: f64,
    pub normalized_throughput: f64,
    pub throughput_bps: f64,
    pub mean_access_delay: f64,
    pub station_access_delay: f64,
    pub mean_collisions_per_service: f64,
    pub collision_probability: f64,
    pub slot_utilization: f64,
    pub attempt_rate: f64,
    pub successes: u64,
    pub collisions: u64,
    pub drops: u64,
    pub jain_index: f64,
}

impl SimRow {
    pub fn new(cfg: &SimConfig, replicate: u32, m: &SimMetrics, units: Units) -> Self {
        SimRow {
            replicate,
            seed: cfg.seed.wrapping_add(replicate as u64),
            rng: RNG_ALGORITHM.to_string(),
            policy: cfg.policy.name().to_string(),
            mode: cfg.mode.to_string(),
            station_count: cfg.station_count,
            payload: cfg.payload.mean(),
            normalized_throughput: m.normalized_throughput,
            throughput_bps: m.throughput_bps,
            mean_access_delay: units.apply(m.mean_access_delay, &cfg.timing),
            station_access_delay: units.apply(m.station_access_delay, &cfg.timing),
            mean_collisions_per_service: m.mean_collisions_per_service,
            collision_probability: m.collision_probability,
            slot_utilization: m.slot_utilization,
            attempt_rate: m.attempt_rate,
            successes: m.successes,
            collisions: m.collisions,
            drops: m.drops,
            jain_index: m.jain_index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub metric: String,
    pub mean: f64,
    pub half_width_95: f64,
    pub replications: u32,
}

pub fn summary_rows(r: &ReplicatedMetrics, units: Units, t: &TimingParams) -> Vec<SummaryRow> {
    let delay = |e: crate::sim::Estimate| crate::sim::Estimate {
        mean: units.apply(e.mean, t),
        half_width: units.apply(e.half_width, t),
    };
    [
        ("normalized_throughput", r.normalized_throughput),
        ("throughput_bps", r.throughput_bps),
        ("mean_access_delay", delay(r.mean_access_delay)),
        ("station_access_delay", delay(r.station_access_delay)),
        ("mean_collisions_per_service", r.mean_collisions_per_service),
        ("collision_probability", r.collision_probability),
        ("slot_utilization", r.slot_utilization),
        ("attempt_rate", r.attempt_rate),
        ("drops", r.drops),
        ("jain_index", r.jain_index),
    ]
    .into_iter()
    .map(|(name, e)| SummaryRow {
        metric: name.to_string(),
        mean: e.mean,
        half_width_95: e.half_width,
        replications: r.replications,
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    /// `estimation` or `payload`
    pub experiment: String,
    pub value: f64,
    pub normalized_throughput: f64,
    pub half_width_95: f64,
    pub throughput_bps: f64,
    /// relative to the error-free run (estimation rows only)
    pub change: Option<f64>,
}

pub fn sensitivity_rows(t: &SensitivityTable) -> Vec<SensitivityRow> {
    let est = t.estimation.iter().map(|r| SensitivityRow {
        experiment: "estimation".into(),
        value: r.ratio,
        normalized_throughput: r.normalized_throughput.mean,
        half_width_95: r.normalized_throughput.half_width,
        throughput_bps: r.throughput_bps.mean,
        change: Some(r.change),
    });
    let pay = t.payload.iter().map(|r| SensitivityRow {
        experiment: "payload".into(),
        value: r.payload,
        normalized_throughput: r.normalized_throughput.mean,
        half_width_95: r.normalized_throughput.half_width,
        throughput_bps: r.throughput_bps.mean,
        change: None,
    });
    est.chain(pay).collect()
}

pub fn write_csv<T: Serialize>(w: impl Write, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let f =
        std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(std::io::BufWriter::new(f), rows)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
