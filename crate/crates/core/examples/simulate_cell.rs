//! Saturated cell of 20 stations, ABTMAC against legacy DCF, five seeds each.
//!
//! cargo run --release --example simulate_cell

use abtmac::analytic::{evaluate, ModelPoint};
use abtmac::sim::{run_replicated, Policy, SimConfig};
use abtmac::timing::{AccessMode, TimingParams};

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;
    for mode in AccessMode::ALL {
        let model = evaluate(&ModelPoint::new(0.7, 34.0, mode)?, &d)?;
        println!(
            "{mode}: model at lambda 0.7 gives T = {:.4}, delay = {:.2}",
            model.throughput, model.delay
        );
        for policy in [Policy::abtmac(0.7), Policy::legacy()] {
            let cfg = SimConfig::saturated(20, mode, policy, 34.0).with_duration(2.0e5);
            let r = run_replicated(&cfg, 5)?;
            println!(
                "  {:>7}: T = {:.4} ± {:.4}, delay = {:.2}, collisions/service = {:.3}, S_U = {:.3}",
                policy.name(),
                r.normalized_throughput.mean,
                r.normalized_throughput.half_width,
                r.mean_access_delay.mean,
                r.mean_collisions_per_service.mean,
                r.slot_utilization.mean
            );
        }
    }
    Ok(())
}
