//! Choosing the attempt rate (and, without RTS/CTS, the payload length).
//!
//! Four tools: overhead minimisation, the collision/idle balance that fixes
//! the payload for a given rate, robustness of the access delay to a wrong
//! station-count estimate, and the dominant real pole of the access-delay
//! transform as a stability indicator.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, mean_collisions, ModelPoint};
use crate::error::{require_positive_rate, Error, Result};
use crate::numeric::{bisect, golden_section_min, scan_for_sign_change};
use crate::timing::{AccessMode, SlotDurations};

/// Leftmost `s` examined when looking for the dominant pole.
pub const POLE_SCAN_LIMIT: f64 = -50.0;
pub const POLE_SCAN_STEP: f64 = 1e-3;
pub const POLE_TOLERANCE: f64 = 1e-10;

/// Search interval and tolerance for overhead minimisation.
pub const OVERHEAD_SEARCH: (f64, f64) = (0.01, 2.0);
pub const OVERHEAD_TOLERANCE: f64 = 1e-5;

/// Search interval for the tolerable estimation-error ratio.
pub const RATIO_SEARCH: (f64, f64) = (1e-2, 1e2);
pub const RATIO_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_DELAY_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lambda: f64,
    pub payload: f64,
    pub mode: AccessMode,
    /// `|s*|` in 1/slots, where `s* < 0` is the real pole nearest the origin.
    pub pole_distance: f64,
}

/// Range of `M̃/M` over which the access delay stays within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessBounds {
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub delay_tolerance: f64,
}

/// Busy time that follows each collision in the delay transform:
/// RTS plus EIFS, or frame plus EIFS without RTS/CTS.
fn collision_lag(pt: &ModelPoint, d: &SlotDurations) -> f64 {
    d.collision_busy(pt.mode, pt.payload)
}

/// Denominator of the access-delay Laplace transform at real `s`:
///
/// `(1 - e^-λ) e^{s/λ} - (1 - e^-λ - λe^-λ) e^{-D s}`
///
/// Its zeros are the poles of the transform. At `s = 0` it equals `λe^-λ`.
pub fn delay_characteristic(pt: &ModelPoint, d: &SlotDurations, s: f64) -> f64 {
    let l = pt.lambda;
    let busy = -(-l).exp_m1();
    let collide = busy - l * (-l).exp();
    busy * (s / l).exp() - collide * (-collision_lag(pt, d) * s).exp()
}

/// Distance from the imaginary axis of the real pole nearest the origin.
///
/// Scans `s` downward from 0 in steps of [`POLE_SCAN_STEP`] until the
/// characteristic changes sign, then bisects the bracket.
pub fn dominant_pole_distance(pt: &ModelPoint, d: &SlotDurations) -> Result<StabilityReport> {
    require_positive_rate(pt.lambda)?;
    let f = |s: f64| delay_characteristic(pt, d, s);
    let (near, far) =
        scan_for_sign_change(f, 0.0, POLE_SCAN_LIMIT, POLE_SCAN_STEP).ok_or_else(|| {
            Error::Analysis(format!(
                "no real pole in [{POLE_SCAN_LIMIT}, 0) for lambda={} payload={} mode={}",
                pt.lambda, pt.payload, pt.mode
            ))
        })?;
    let root = bisect(f, far, near, POLE_TOLERANCE)?;
    Ok(StabilityReport {
        lambda: pt.lambda,
        payload: pt.payload,
        mode: pt.mode,
        pole_distance: -root,
    })
}

/// Payload that balances the mean collision cost against the mean idle time
/// of a frame service (basic access):
///
/// `n̄ · x̄' = n̄ · EIFS + (n̄ + 1)/λ + DIFS + SIFS`
pub fn optimal_payload(lambda: f64, d: &SlotDurations) -> Result<f64> {
    let n = mean_collisions(lambda)?;
    Ok(d.eifs + (1.0 + 1.0 / n) / lambda + (d.difs + d.sifs) / n)
}

/// Mean collision cost minus mean idle time of a frame service (basic access).
pub fn balance_residual(lambda: f64, payload: f64, d: &SlotDurations) -> Result<f64> {
    let n = mean_collisions(lambda)?;
    let collision_cost = n * payload;
    let idle = n * d.eifs + (n + 1.0) / lambda + d.difs + d.sifs;
    Ok(collision_cost - idle)
}

/// Overhead as a function of the rate alone. For basic access without an
/// explicit payload the balanced payload is substituted.
pub fn overhead_at(
    lambda: f64,
    mode: AccessMode,
    payload: Option<f64>,
    d: &SlotDurations,
) -> Result<f64> {
    let payload = match (mode, payload) {
        (_, Some(x)) => x,
        (AccessMode::BasicAccess, None) => optimal_payload(lambda, d)?,
        // Payload cancels out of the RTS/CTS overhead.
        (AccessMode::RtsCts, None) => 1.0,
    };
    let pt = ModelPoint::new(lambda, payload, mode)?;
    analytic::overhead(&pt, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadOptimum {
    pub lambda: f64,
    pub overhead: f64,
    /// Payload at the optimum when it was chosen jointly with the rate.
    pub payload: Option<f64>,
}

/// Golden-section search for the rate minimising the overhead.
pub fn minimize_overhead(
    mode: AccessMode,
    payload: Option<f64>,
    d: &SlotDurations,
) -> Result<OverheadOptimum> {
    if let Some(x) = payload {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::invalid(
                "payload",
                format!("must be positive, got {x}"),
            ));
        }
    }
    let (lo, hi) = OVERHEAD_SEARCH;
    let (lambda, overhead) = golden_section_min(
        |l| overhead_at(l, mode, payload, d).unwrap_or(f64::INFINITY),
        lo,
        hi,
        OVERHEAD_TOLERANCE,
    );
    let payload = match (mode, payload) {
        (AccessMode::BasicAccess, None) => Some(optimal_payload(lambda, d)?),
        (_, p) => p,
    };
    Ok(OverheadOptimum {
        lambda,
        overhead,
        payload,
    })
}

/// Tolerable `M̃/M` range at a design point.
///
/// Using `M̃ = k·M` makes stations run at `λ/k`. A ratio is tolerated while
/// the access delay has not grown by more than `delay_tolerance` relative to
/// the design delay; a shorter delay is never a violation. The bounds are
/// the first violations met walking outward from `k = 1`, bisected to
/// [`RATIO_TOLERANCE`]. If no violation occurs inside [`RATIO_SEARCH`] the
/// search limit is returned.
pub fn tolerable_ratio_bounds(
    pt: &ModelPoint,
    d: &SlotDurations,
    delay_tolerance: f64,
) -> Result<RobustnessBounds> {
    if !(delay_tolerance > 0.0 && delay_tolerance < 1.0) {
        return Err(Error::invalid(
            "delay_tolerance",
            format!("must lie in (0, 1), got {delay_tolerance}"),
        ));
    }
    let base = analytic::mean_access_delay(pt, d)?;
    let excess = |k: f64| -> f64 {
        let shifted = ModelPoint {
            lambda: pt.lambda / k,
            ..*pt
        };
        match analytic::mean_access_delay(&shifted, d) {
            Ok(v) => (v - base) / base - delay_tolerance,
            Err(_) => f64::INFINITY,
        }
    };
    let (lo, hi) = RATIO_SEARCH;
    let edge = |target: f64| -> Result<f64> {
        // Walk in log-space: the interesting structure spans decades.
        let (a, b) = (0f64, target.ln());
        let step = 1e-3;
        match scan_for_sign_change(|u| excess(u.exp()), a, b, step) {
            Some((inside, outside)) => {
                let u = bisect(|u| excess(u.exp()), inside, outside, RATIO_TOLERANCE * 1e-3)?;
                Ok(u.exp())
            }
            None => Ok(target),
        }
    };
    Ok(RobustnessBounds {
        max_ratio: edge(hi)?,
        min_ratio: edge(lo)?,
        delay_tolerance,
    })
}

/// Relative change of the access delay when the network actually runs at
/// `λ / factor` (e.g. the station population suddenly grew by `factor`).
pub fn delay_variation(pt: &ModelPoint, d: &SlotDurations, factor: f64) -> Result<f64> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::invalid(
            "factor",
            format!("must be positive, got {factor}"),
        ));
    }
    let base = analytic::mean_access_delay(pt, d)?;
    let shifted = ModelPoint {
        lambda: pt.lambda / factor,
        ..*pt
    };
    Ok((analytic::mean_access_delay(&shifted, d)? - base) / base)
}

/// Recommended operating point: 0.7 with RTS/CTS, 0.55 with a 34-slot
/// payload without.
pub fn recommended_rate(mode: AccessMode) -> (f64, Option<f64>) {
    match mode {
        AccessMode::RtsCts => (0.7, None),
        AccessMode::BasicAccess => (0.55, Some(34.0)),
    }
}

/// Admissible rate band for each mode.
pub fn admissible_band(mode: AccessMode) -> (f64, f64) {
    match mode {
        AccessMode::RtsCts => (0.26, 0.8),
        AccessMode::BasicAccess => (0.3, 0.7),
    }
}
