//! Two service classes sharing one cell: voice stations back off four times
//! less than the average, data stations make up the difference.

use abtmac::abtmac::{class_delays, qos_rates, QosClass, QosClassSpec};
use abtmac::analytic::ModelPoint;
use abtmac::timing::{AccessMode, TimingParams};

fn main() -> abtmac::Result<()> {
    let d = TimingParams::default().slot_durations()?;
    let spec = QosClassSpec {
        classes: vec![
            QosClass {
                id: "voice".into(),
                station_count: 4,
                backoff_scale: 0.25,
            },
            QosClass {
                id: "data".into(),
                station_count: 16,
                backoff_scale: 1.1875,
            },
        ],
    };
    let pt = ModelPoint::new(0.7, 34.0, AccessMode::RtsCts)?;
    let rates = qos_rates(pt.lambda, 20, &spec)?;
    let delays = class_delays(&pt, 20, &spec, &d)?;
    for (id, r) in &rates {
        println!(
            "{id:>6}: group rate {:.4}, per-station equivalent {:.4}, delay {:.2} slots",
            r.group_rate, r.station_equivalent_rate, delays[id]
        );
    }
    Ok(())
}
