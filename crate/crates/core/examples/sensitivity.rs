//! Throughput when stations misjudge the population, and when frames are
//! longer than the balanced payload (no RTS/CTS).
//!
//! cargo run --release --example sensitivity

use abtmac::sim::{sensitivity_suite, Policy, SimConfig};
use abtmac::timing::AccessMode;

fn main() -> abtmac::Result<()> {
    let base = SimConfig::saturated(20, AccessMode::BasicAccess, Policy::abtmac(0.55), 34.0)
        .with_duration(2.0e5);
    let t = sensitivity_suite(&base, &[0.5, 1.0, 1.5], &[34.0, 102.0, 410.0, 820.0], 3)?;
    for r in &t.estimation {
        println!(
            "M~/M = {:<4} T = {:.4} ({:+.1}%)",
            r.ratio,
            r.normalized_throughput.mean,
            100.0 * r.change
        );
    }
    for r in &t.payload {
        println!(
            "payload {:>4} slots: T = {:.4}",
            r.payload, r.normalized_throughput.mean
        );
    }
    Ok(())
}
