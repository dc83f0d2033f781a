//! Throughput, delay and collision statistics of the fluid model for both
//! access modes at a handful of attempt rates.
//!
//! cargo run --example fluid_model

use abtmac::analytic::{evaluate, ModelPoint};
use abtmac::timing::{AccessMode, TimingParams};

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;
    println!(
        "{:>6} {:>6} {:>8} {:>8} {:>10} {:>9}",
        "mode", "lambda", "n_bar", "T", "delay", "overhead"
    );
    for mode in AccessMode::ALL {
        for lambda in [0.1, 0.3, 0.55, 0.7, 1.0] {
            let m = evaluate(&ModelPoint::new(lambda, 34.0, mode)?, &d)?;
            println!(
                "{:>6} {:>6.2} {:>8.4} {:>8.4} {:>10.3} {:>9.3}",
                mode, lambda, m.n_bar, m.throughput, m.delay, m.overhead
            );
        }
    }
    Ok(())
}
