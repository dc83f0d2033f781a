//! Distance of the dominant pole of the access-delay transform from the
//! imaginary axis, with balanced payloads (no RTS/CTS).

use abtmac::analytic::ModelPoint;
use abtmac::design::{dominant_pole_distance, optimal_payload};
use abtmac::timing::{AccessMode, TimingParams};

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;
    let mut best = (0.0, 0.0);
    for i in 1..=20 {
        let lambda = 0.05 * i as f64;
        let x = optimal_payload(lambda, &d)?;
        let r = dominant_pole_distance(&ModelPoint::new(lambda, x, AccessMode::BasicAccess)?, &d)?;
        let bar = "#".repeat((r.pole_distance * 1500.0) as usize);
        println!("{lambda:>5.2} {:>8.5} {bar}", r.pole_distance);
        if r.pole_distance > best.1 {
            best = (lambda, r.pole_distance);
        }
    }
    println!("most stable on this grid: lambda = {:.2}", best.0);
    Ok(())
}
