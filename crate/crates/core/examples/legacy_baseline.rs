//! Attempt rate legacy DCF settles at for growing populations, and what the
//! fluid model predicts at that rate compared with ABTMAC's fixed rate.

use abtmac::legacy::DcfParams;
use abtmac::report::baseline_sweep;
use abtmac::timing::TimingParams;

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;
    let rows = baseline_sweep(&[10, 20, 50, 100], 34.0, &DcfParams::default(), &d)?;
    println!("   M  legacy λ  legacy T(rts)  abtmac T(rts)  legacy T(basic)  abtmac T(basic)");
    for r in rows {
        println!(
            "{:>4}  {:>8.3}  {:>13.4}  {:>13.4}  {:>15.4}  {:>15.4}",
            r.station_count,
            r.legacy_lambda,
            r.legacy_throughput_rts,
            r.abtmac_throughput_rts,
            r.legacy_throughput_basic,
            r.abtmac_throughput_basic
        );
    }
    Ok(())
}
