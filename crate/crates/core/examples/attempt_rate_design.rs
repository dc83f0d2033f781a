//! Picking the attempt rate: overhead minimum, balanced payload without
//! RTS/CTS and the tolerable station-count estimation error.

use abtmac::analytic::ModelPoint;
use abtmac::design::{minimize_overhead, optimal_payload, tolerable_ratio_bounds};
use abtmac::timing::{AccessMode, TimingParams};

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;

    let rts = minimize_overhead(AccessMode::RtsCts, None, &d)?;
    println!(
        "RTS/CTS overhead minimum at lambda = {:.4} ({:.2} slots)",
        rts.lambda, rts.overhead
    );
    let joint = minimize_overhead(AccessMode::BasicAccess, None, &d)?;
    println!(
        "basic access joint optimum: lambda = {:.4}, payload = {:.2} slots",
        joint.lambda,
        joint.payload.unwrap_or(f64::NAN)
    );

    println!("\nlambda  payload  tolerable M~/M");
    for lambda in [0.31, 0.45, 0.55, 0.6, 0.7] {
        let x = optimal_payload(lambda, &d)?;
        let b = tolerable_ratio_bounds(
            &ModelPoint::new(lambda, x, AccessMode::BasicAccess)?,
            &d,
            0.1,
        )?;
        println!(
            "{lambda:>6} {x:>8.2}  [{:.3}, {:.2}]",
            b.min_ratio, b.max_ratio
        );
    }
    Ok(())
}
