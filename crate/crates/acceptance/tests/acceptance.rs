//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::time::{Duration, Instant};

use abtmac::abtmac::{cw_min, AbtmacParams};
use abtmac::analytic::{
    collision_count_pmf, evaluate, mean_access_delay, mean_collisions, throughput, ModelPoint,
};
use abtmac::design::{
    balance_residual, delay_variation, dominant_pole_distance, minimize_overhead, optimal_payload,
    tolerable_ratio_bounds, DEFAULT_DELAY_TOLERANCE,
};
use abtmac::legacy::{legacy_attempt_rate, DcfParams};
use abtmac::numeric::golden_section_min;
use abtmac::sim::{
    run, run_replicated, run_traced, run_with_budget, sensitivity_suite, slot_utilization_report,
    Policy, SimConfig,
};
use abtmac::timing::{AccessMode, SlotDurations};

type Outcome = (bool, String);

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn d() -> SlotDurations {
    SlotDurations::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pt(lambda: f64, payload: f64, mode: AccessMode) -> ModelPoint {
    ModelPoint::new(lambda, payload, mode).unwrap()
}

fn table2() -> Outcome {
    // (λ, delay, delay tolerance, max ratio, min ratio)
    let rows = [
        (0.1, 12.06, 0.03, 1.25, 0.83),
        (0.4, 9.09, 0.01, 3.0, 0.85),
        (0.5, 10.39, 0.01, 4.5, 0.89),
        (0.7, 13.81, 0.01, 9.6, 0.92),
        (1.0, 20.08, 0.03, 13.8, 0.97),
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for (l, delay, tol, max, min) in rows {
        let p = pt(l, 34.0, AccessMode::RtsCts);
        let got = mean_access_delay(&p, &d()).unwrap();
        let b = tolerable_ratio_bounds(&p, &d(), DEFAULT_DELAY_TOLERANCE).unwrap();
        let row_ok = rel(got, delay) <= tol
            && (b.max_ratio - max).abs() <= 0.5
            && (b.min_ratio - min).abs() <= 0.02;
        if !row_ok {
            bad.push(format!(
                "λ={l}: delay {got:.3}/{delay}, max {:.3}/{max}, min {:.3}/{min}",
                b.max_ratio, b.min_ratio
            ));
        }
        ok &= row_ok;
    }
    let detail = if bad.is_empty() {
        "all five rows within tolerance".to_string()
    } else {
        format!("off: {}", bad.join("; "))
    };
    (ok, detail)
}

fn table3() -> Outcome {
    let rows = [
        (0.31, 58.0, 16.84, 70.34),
        (0.45, 40.0, 18.11, 61.10),
        (0.55, 34.0, 19.82, 55.76),
        (0.6, 32.0, 20.87, 53.41),
        (0.7, 29.0, 23.49, 48.89),
    ];
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (l, x, delay, tp) in rows {
        let payload = optimal_payload(l, &d()).unwrap();
        let m = evaluate(&pt(l, payload, AccessMode::BasicAccess), &d()).unwrap();
        let dx = (payload - x).abs();
        let dt = (100.0 * m.throughput - tp).abs();
        let dd = rel(m.delay, delay);
        ok &= dx <= 1.0 && dt <= 0.5 && dd <= 0.03;
        worst = (worst.0.max(dx), worst.1.max(dt), worst.2.max(dd));
    }
    (
        ok,
        format!(
            "max |Δpayload| {:.3} slots, max |Δthroughput| {:.3} pp, max delay error {:.2}%",
            worst.0,
            worst.1,
            100.0 * worst.2
        ),
    )
}

fn joint_optimum() -> Outcome {
    let o = minimize_overhead(AccessMode::BasicAccess, None, &d()).unwrap();
    let x = o.payload.unwrap_or(f64::NAN);
    (
        (o.lambda - 0.31).abs() <= 0.01 && (x - 58.0).abs() <= 1.0,
        format!("λ* = {:.4}, payload = {x:.2}", o.lambda),
    )
}

fn stability() -> Outcome {
    let pole = |l: f64| {
        let x = optimal_payload(l, &d()).unwrap();
        dominant_pole_distance(&pt(l, x, AccessMode::BasicAccess), &d())
            .unwrap()
            .pole_distance
    };
    let (argmax, _) = golden_section_min(|l| -pole(l), 0.05, 1.5, 1e-6);
    let (a, b) = (pole(0.3), pole(0.7));
    let spread = (a - b).abs() / a.max(b);
    (
        (argmax - 0.45).abs() <= 0.03 && spread < 0.05,
        format!(
            "argmax λ = {argmax:.4}; pole(0.3) = {a:.5}, pole(0.7) = {b:.5}, differ by {:.2}%",
            100.0 * spread
        ),
    )
}

fn cw_min_triple() -> Outcome {
    let cases = [(0.5, 10, 20), (0.55, 100, 92), (0.7, 100, 72)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (l, m, want) in cases {
        let got = cw_min(&AbtmacParams::with_target(l), m).unwrap();
        ok &= got == want;
        parts.push(format!("({l},{m})→{got} (want {want})"));
    }
    (ok, parts.join(", "))
}

fn sim_model_agreement() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (mode, lambda) in [(AccessMode::RtsCts, 0.7), (AccessMode::BasicAccess, 0.55)] {
        let model = evaluate(&pt(lambda, 34.0, mode), &d()).unwrap();
        let cfg = SimConfig::saturated(20, mode, Policy::abtmac(lambda), 34.0).with_duration(1.0e6);
        let r = run_replicated(&cfg, 5).unwrap();
        let et = rel(r.normalized_throughput.mean, model.throughput);
        let ed = rel(r.mean_access_delay.mean, model.delay);
        ok &= et <= 0.10 && ed <= 0.10;
        parts.push(format!(
            "{mode} λ={lambda}: T {:.4} vs {:.4} ({:+.1}%), delay {:.2} vs {:.2} ({:+.1}%)",
            r.normalized_throughput.mean,
            model.throughput,
            100.0 * (r.normalized_throughput.mean / model.throughput - 1.0),
            r.mean_access_delay.mean,
            model.delay,
            100.0 * (r.mean_access_delay.mean / model.delay - 1.0)
        ));
    }
    (ok, parts.join("; "))
}

fn slot_utilization() -> Outcome {
    let mut grid: Vec<SimConfig> = [20, 60, 100]
        .iter()
        .map(|&m| SimConfig::saturated(m, AccessMode::RtsCts, Policy::abtmac(0.7), 34.0))
        .collect();
    grid.push(SimConfig::saturated(
        100,
        AccessMode::BasicAccess,
        Policy::legacy(),
        34.0,
    ));
    let rows = slot_utilization_report(&grid, 3).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let target = if i < 3 { 0.76 } else { 0.73 };
        let su = r.slot_utilization.mean;
        ok &= (su - target).abs() <= 0.08;
        parts.push(format!(
            "{} {} M={}: {su:.3}",
            r.policy, r.mode, r.station_count
        ));
    }
    (ok, parts.join(", "))
}

fn flat_in_m() -> Outcome {
    let ms = [10, 50, 100];
    let spread = |xs: &[f64]| {
        let max = xs.iter().cloned().fold(f64::MIN, f64::max);
        let min = xs.iter().cloned().fold(f64::MAX, f64::min);
        max / min - 1.0
    };
    let abt: Vec<_> = ms
        .iter()
        .map(|&m| {
            let c = SimConfig::saturated(m, AccessMode::RtsCts, Policy::abtmac(0.7), 34.0);
            run_replicated(&c, 3).unwrap()
        })
        .collect();
    let n: Vec<f64> = abt
        .iter()
        .map(|r| r.mean_collisions_per_service.mean)
        .collect();
    let t: Vec<f64> = abt.iter().map(|r| r.normalized_throughput.mean).collect();
    let mut legacy_ok = true;
    let mut legacy_parts = Vec::new();
    for mode in AccessMode::ALL {
        let lt: Vec<f64> = ms
            .iter()
            .map(|&m| {
                let c = SimConfig::saturated(m, mode, Policy::legacy(), 34.0);
                run_replicated(&c, 3).unwrap().normalized_throughput.mean
            })
            .collect();
        legacy_ok &= lt.windows(2).all(|w| w[1] < w[0]);
        legacy_parts.push(format!("{mode} {:.4}/{:.4}/{:.4}", lt[0], lt[1], lt[2]));
    }
    let (sn, st) = (spread(&n), spread(&t));
    (
        sn < 0.15 && st < 0.15 && legacy_ok,
        format!(
            "abtmac n̄ {:.3}/{:.3}/{:.3} (spread {:.1}%), T {:.4}/{:.4}/{:.4} (spread {:.1}%); legacy T {}",
            n[0],
            n[1],
            n[2],
            100.0 * sn,
            t[0],
            t[1],
            t[2],
            100.0 * st,
            legacy_parts.join(", ")
        ),
    )
}

fn sensitivity() -> Outcome {
    let base = SimConfig::saturated(20, AccessMode::BasicAccess, Policy::abtmac(0.55), 34.0);
    let t = sensitivity_suite(&base, &[0.5, 1.5], &[34.0, 102.0, 410.0, 820.0], 5).unwrap();
    let drop_under = -t.estimation[0].change;
    let drop_over = -t.estimation[1].change;
    let tp: Vec<f64> = t
        .payload
        .iter()
        .map(|r| r.normalized_throughput.mean)
        .collect();
    let decreasing = tp.windows(2).all(|w| w[1] < w[0]);

    let mut rts = base.clone();
    rts.mode = AccessMode::RtsCts;
    rts.policy = Policy::abtmac(0.7);
    let r = sensitivity_suite(&rts, &[1.5], &[], 5).unwrap();
    (
        drop_under >= drop_over && decreasing,
        format!(
            "basic drop at M~/M=0.5 {:.1}% vs 1.5 {:.1}%; payload 34/102/410/820 → T {:.4}/{:.4}/{:.4}/{:.4} ({}); rts M~/M=1.5 change {:+.1}%",
            100.0 * drop_under,
            100.0 * drop_over,
            tp[0],
            tp[1],
            tp[2],
            tp[3],
            if decreasing { "decreasing" } else { "not decreasing" },
            100.0 * r.estimation[0].change
        ),
    )
}

fn delay_robustness() -> Outcome {
    let v = delay_variation(&pt(0.55, 34.0, AccessMode::BasicAccess), &d(), 3.0).unwrap();
    (
        (v.abs() - 0.42).abs() <= 0.05,
        format!("delay change at λ/3: {:+.2}%", 100.0 * v),
    )
}

fn property_suites() -> Outcome {
    let mut fails = Vec::new();
    // throughput against the plain-number forms
    let n_direct = |l: f64| {
        let e = (-l).exp();
        (1.0 - e - l * e) / (l * e)
    };
    let mut worst: f64 = 0.0;
    for i in 0..=39 {
        let l = 0.05 + 0.05 * i as f64;
        for x in [10.0, 34.0, 58.0, 100.0] {
            let n = n_direct(l);
            let rts = x / (x + 1.0 / l + 23.7 * n + 23.2);
            let basic = x / (x + 8.6 + 1.0 / l + 15.7 * n + n * x);
            worst = worst
                .max((throughput(&pt(l, x, AccessMode::RtsCts), &d()).unwrap() - rts).abs())
                .max((throughput(&pt(l, x, AccessMode::BasicAccess), &d()).unwrap() - basic).abs());
        }
    }
    if worst >= 1e-9 {
        fails.push(format!("throughput identity {worst:e}"));
    }
    for l in [0.05, 0.5, 1.0, 2.0] {
        let s: f64 = (0..2000).map(|n| collision_count_pmf(l, n).unwrap()).sum();
        if (s - 1.0).abs() >= 1e-9 {
            fails.push(format!("pmf sum {s} at {l}"));
        }
        let r = balance_residual(l, optimal_payload(l, &d()).unwrap(), &d()).unwrap();
        if r.abs() >= 1e-9 {
            fails.push(format!("balance residual {r:e} at {l}"));
        }
    }
    let cfg = SimConfig::saturated(20, AccessMode::BasicAccess, Policy::abtmac(0.55), 34.0)
        .with_duration(2.0e5)
        .with_seed(5);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    if run_traced(&cfg, &mut a).unwrap() != run_traced(&cfg, &mut b).unwrap() || a != b {
        fails.push("simulator not deterministic".into());
    }
    let (_, budget) = run_with_budget(&cfg).unwrap();
    if (budget.idle + budget.busy - budget.end).abs() > 1e-6 * budget.end
        || budget.end < cfg.duration
        || budget.end - cfg.duration > 34.0 + 18.2
    {
        fails.push(format!("clock not conserved {budget:?}"));
    }
    let rates: Vec<_> = (10..=100)
        .step_by(10)
        .map(|m| legacy_attempt_rate(m, &DcfParams::default()).unwrap())
        .collect();
    if rates.iter().any(|r| r.residual >= 1e-6) {
        fails.push("legacy residual".into());
    }
    let (lo, hi) = (rates[0].lambda, rates[rates.len() - 1].lambda);
    if !(lo < 1.71 && hi > 0.56) {
        fails.push(format!("legacy band [{lo:.3}, {hi:.3}]"));
    }
    let ok = fails.is_empty();
    let detail = if ok {
        format!("identity err {worst:.1e}; legacy band [{lo:.3}, {hi:.3}]; deterministic; clock conserved")
    } else {
        fails.join("; ")
    };
    (ok, detail)
}

fn attempt_rate_invariant() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [20, 50, 100] {
        let p = AbtmacParams::with_target(0.7);
        let w = cw_min(&p, m).unwrap();
        let policy = Policy::FixedWindow {
            cw_min: w,
            cw_max: p.cw_max,
            retry_limit: p.retry_limit,
        };
        let r = run(&SimConfig::saturated(m, AccessMode::RtsCts, policy, 34.0)).unwrap();
        ok &= rel(r.attempt_rate, 0.7) <= 0.15;
        parts.push(format!("M={m}: {:.3}", r.attempt_rate));
    }
    (
        ok,
        format!("measured attempt rate vs target 0.7: {}", parts.join(", ")),
    )
}

fn collisions_above_model_invariant() -> Outcome {
    let analytic = mean_collisions(0.7).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [10, 20, 50, 100] {
        let c = SimConfig::saturated(m, AccessMode::RtsCts, Policy::abtmac(0.7), 34.0);
        let r = run_replicated(&c, 5).unwrap();
        let e = r.mean_collisions_per_service;
        ok &= e.mean >= analytic - e.half_width;
        parts.push(format!("M={m}: {:.3}±{:.3}", e.mean, e.half_width));
    }
    (
        ok,
        format!("analytic n̄ {analytic:.4}; measured {}", parts.join(", ")),
    )
}

fn main() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion {
            id: "1",
            name: "RTS/CTS robustness table",
            budget: s(1),
            check: table2,
        },
        Criterion {
            id: "2",
            name: "basic-access robustness table",
            budget: s(1),
            check: table3,
        },
        Criterion {
            id: "3",
            name: "joint optimum",
            budget: s(1),
            check: joint_optimum,
        },
        Criterion {
            id: "4",
            name: "stability",
            budget: s(5),
            check: stability,
        },
        Criterion {
            id: "5",
            name: "CW_min triple",
            budget: s(1),
            check: cw_min_triple,
        },
        Criterion {
            id: "6",
            name: "simulator vs model",
            budget: s(120),
            check: sim_model_agreement,
        },
        Criterion {
            id: "7",
            name: "slot utilization",
            budget: s(300),
            check: slot_utilization,
        },
        Criterion {
            id: "8",
            name: "flat in M",
            budget: s(300),
            check: flat_in_m,
        },
        Criterion {
            id: "9",
            name: "sensitivity ordinals",
            budget: s(300),
            check: sensitivity,
        },
        Criterion {
            id: "10",
            name: "delay variation",
            budget: s(1),
            check: delay_robustness,
        },
        Criterion {
            id: "11",
            name: "property suites",
            budget: s(300),
            check: property_suites,
        },
        Criterion {
            id: "inv-a",
            name: "attempt rate tracks target",
            budget: s(300),
            check: attempt_rate_invariant,
        },
        Criterion {
            id: "inv-b",
            name: "measured n̄ not below model",
            budget: s(300),
            check: collisions_above_model_invariant,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let (ok, detail) = (c.check)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = ok && in_time;
        println!(
            "{} criterion {:>5} {:<30} [{:.2}s] {}{}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            detail,
            if in_time {
                String::new()
            } else {
                format!(" (over {:?} budget)", c.budget)
            }
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!(
            "{} of {} failed: {}",
            failed.len(),
            criteria.len(),
            failed.join(", ")
        );
        std::process::exit(1);
    }
    println!("all {} passed", criteria.len());
}
