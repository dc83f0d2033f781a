use abtmac::abtmac::{
    calibrate_k_prime, estimate_active_nodes, AbtmacParams, QosClass, QosClassSpec,
};
use abtmac::sim::{
    run, run_replicated, run_traced, run_with_budget, EstimateSource, PayloadModel, Policy,
    SimConfig, Traffic,
};
use abtmac::timing::{AccessMode, SlotDurations};
use abtmac::Error;

fn cell(m: u32, mode: AccessMode, policy: Policy) -> SimConfig {
    SimConfig::saturated(m, mode, policy, 34.0).with_duration(2.0e5)
}

#[test]
fn same_seed_same_run() {
    let c = cell(15, AccessMode::BasicAccess, Policy::abtmac(0.55)).with_seed(42);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let ma = run_traced(&c, &mut a).unwrap();
    let mb = run_traced(&c, &mut b).unwrap();
    assert_eq!(ma, mb);
    assert_eq!(a, b);
    assert_eq!(run(&c).unwrap(), ma);
    assert_ne!(run(&c.clone().with_seed(43)).unwrap(), ma);
}

#[test]
fn replicates_use_consecutive_seeds() {
    let c = cell(10, AccessMode::RtsCts, Policy::legacy()).with_seed(100);
    let r = run_replicated(&c, 3).unwrap();
    for (i, m) in r.runs.iter().enumerate() {
        assert_eq!(*m, run(&c.clone().with_seed(100 + i as u64)).unwrap());
    }
}

#[test]
fn clock_is_conserved() {
    let d = SlotDurations::default();
    for mode in AccessMode::ALL {
        for policy in [Policy::legacy(), Policy::abtmac(0.7)] {
            let c = cell(25, mode, policy);
            let (_, b) = run_with_budget(&c).unwrap();
            assert!((b.idle + b.busy - b.end).abs() < 1e-6 * b.end);
            let longest = d.success_overhead(mode).max(d.collision_busy(mode, 34.0)) + 34.0;
            assert!(b.end >= c.duration && b.end - c.duration <= longest);
        }
    }
}

#[test]
fn metric_ranges() {
    for mode in AccessMode::ALL {
        let m = run(&cell(30, mode, Policy::abtmac(0.7))).unwrap();
        assert!(m.slot_utilization > 0.0 && m.slot_utilization <= 1.0);
        assert!(m.normalized_throughput <= m.slot_utilization);
        assert!(m.collision_probability >= 0.0 && m.collision_probability <= 1.0);
        assert!(m.per_station_success.iter().sum::<u64>() == m.successes);
    }
}

#[test]
fn fair_share_without_starvation() {
    for mode in AccessMode::ALL {
        for policy in [Policy::legacy(), Policy::abtmac(0.7)] {
            let m = run(&cell(20, mode, policy).with_duration(5.0e5)).unwrap();
            assert!(
                m.jain_index() >= 0.95,
                "{} {mode}: {}",
                policy.name(),
                m.jain_index()
            );
        }
    }
}

#[test]
fn zero_windows_always_collide() {
    let policy = Policy::FixedWindow {
        cw_min: 0,
        cw_max: 0,
        retry_limit: 7,
    };
    let m = run(&cell(2, AccessMode::BasicAccess, policy)).unwrap();
    assert_eq!(m.successes, 0);
    assert_eq!(m.collision_probability, 1.0);
    assert_eq!(m.normalized_throughput, 0.0);
    assert!(m.drops > 0);
}

#[test]
fn lone_station_closed_form() {
    // one saturated station: throughput x / (x + W/2 + 8.6)
    for (policy, mean_backoff) in [(Policy::legacy(), 16.0), (Policy::abtmac(0.55), 2.5)] {
        let m = run(&cell(1, AccessMode::BasicAccess, policy)).unwrap();
        assert_eq!(m.collisions, 0);
        let expected = 34.0 / (34.0 + mean_backoff + 8.6);
        let rel = (m.normalized_throughput - expected).abs() / expected;
        assert!(
            rel < 0.02,
            "{}: {} vs {expected}",
            policy.name(),
            m.normalized_throughput
        );
    }
}

#[test]
fn light_poisson_load_is_carried() {
    let mut c = cell(10, AccessMode::RtsCts, Policy::legacy()).with_duration(5.0e5);
    c.traffic = Traffic::Poisson { rate: 1e-3 };
    let m = run(&c).unwrap();
    let offered = 10.0 * 1e-3 * 34.0;
    assert!(
        (m.normalized_throughput - offered).abs() / offered < 0.05,
        "{}",
        m.normalized_throughput
    );
    assert_eq!(m.drops, 0);

    c.traffic = Traffic::Poisson { rate: 1e-9 };
    let m = run(&c).unwrap();
    assert!(m.slot_utilization < 1e-3);
}

#[test]
fn geometric_payload_mean() {
    let mut c = cell(5, AccessMode::RtsCts, Policy::legacy()).with_duration(1.0e6);
    c.payload = PayloadModel::Geometric { mean: 40.0 };
    let m = run(&c).unwrap();
    let t = SlotDurations::default();
    // delivered payload per success from throughput and success count
    let per_frame = m.normalized_throughput * m.elapsed / m.successes as f64;
    assert!((per_frame - 40.0).abs() < 2.0, "{per_frame}");
    assert!(t.success_overhead(AccessMode::RtsCts) > 0.0);
}

#[test]
fn more_replications_tighter_interval() {
    // A single 3-replicate interval can be narrow by luck; average over
    // independent seed blocks.
    let c = cell(20, AccessMode::BasicAccess, Policy::abtmac(0.55)).with_duration(5.0e4);
    let mean_width = |n: u32| {
        (0..5u64)
            .map(|k| {
                let r = run_replicated(&c.clone().with_seed(1000 * k), n).unwrap();
                r.normalized_throughput.half_width
            })
            .sum::<f64>()
            / 5.0
    };
    let (few, many) = (mean_width(3), mean_width(10));
    assert!(many < few, "{many} vs {few}");
}

#[test]
fn collision_count_estimator_round_trip() {
    let measure = |m: u32| {
        let c = SimConfig::saturated(m, AccessMode::RtsCts, Policy::abtmac(0.7), 34.0)
            .with_duration(5.0e5);
        run_replicated(&c, 3)
            .unwrap()
            .mean_collisions_per_service
            .mean
    };
    let k = calibrate_k_prime(measure(10), 10).unwrap();
    let est = estimate_active_nodes(measure(50), k).unwrap() as f64;
    assert!((est - 50.0).abs() / 50.0 <= 0.30, "estimated {est}");
}

#[test]
fn measured_estimate_tracks_oracle() {
    let oracle = cell(30, AccessMode::RtsCts, Policy::abtmac(0.7)).with_duration(5.0e5);
    let n10 = run(&cell(10, AccessMode::RtsCts, Policy::abtmac(0.7)).with_duration(5.0e5))
        .unwrap()
        .mean_collisions_per_service;
    let mut measured = oracle.clone();
    measured.policy = Policy::Abtmac {
        params: AbtmacParams {
            k_prime: calibrate_k_prime(n10, 10).unwrap(),
            ..AbtmacParams::with_target(0.7)
        },
        estimate: EstimateSource::Measured { window: 1000 },
    };
    let a = run(&oracle).unwrap().normalized_throughput;
    let b = run(&measured).unwrap().normalized_throughput;
    assert!((a - b).abs() / a < 0.1, "{a} vs {b}");
}

#[test]
fn short_backoff_class_wins_more_often() {
    let mut c = cell(20, AccessMode::RtsCts, Policy::abtmac(0.7)).with_duration(5.0e5);
    c.qos = Some(QosClassSpec {
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
    });
    let m = run(&c).unwrap();
    let voice = m.per_station_success[..4].iter().sum::<u64>() as f64 / 4.0;
    let data = m.per_station_success[4..].iter().sum::<u64>() as f64 / 16.0;
    assert!(voice > 2.0 * data, "voice {voice}, data {data}");
}

#[test]
fn invalid_config_is_rejected() {
    let c = cell(10, AccessMode::RtsCts, Policy::legacy()).with_duration(10.0);
    assert!(
        matches!(run(&c), Err(Error::InvalidParameter { ref field, .. }) if field == "sim.duration")
    );
    let mut c = cell(10, AccessMode::RtsCts, Policy::legacy());
    c.qos = Some(QosClassSpec::default());
    assert!(matches!(run(&c), Err(Error::InvalidParameter { .. })));
}
