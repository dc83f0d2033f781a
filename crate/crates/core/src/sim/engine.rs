//! Slotted contention process for a single cell.
//!
//! All stations sense the channel perfectly. Between busy periods the loop
//! jumps straight to the next slot in which some backoff counter reaches
//! zero; every backlogged counter is decremented by the number of idle slots
//! skipped. A lone transmitter succeeds; two or more collide. The busy period
//! that follows already contains the DIFS (after a success) or EIFS (after a
//! collision) every station must wait before counting down again.

use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abtmac;
use crate::error::{Error, Result};
use crate::timing::SlotDurations;

use super::config::{EstimateSource, PayloadModel, Policy, SimConfig, Traffic};
use super::metrics::{Counters, SimMetrics};

/// Identifier of the pseudo-random generator driving every run.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

#[derive(Debug, Clone)]
struct Frame {
    payload: f64,
}

#[derive(Debug, Clone)]
struct Station {
    counter: u32,
    stage: u32,
    retries: u32,
    cw_min: u32,
    cw_max: u32,
    /// ABTMAC target rate after any QoS scaling.
    target_lambda: f64,
    queue: VecDeque<Frame>,
    next_arrival: f64,
    backoff_start: f64,
}

impl Station {
    fn backlogged(&self) -> bool {
        !self.queue.is_empty()
    }

    fn window(&self) -> u32 {
        let w = (self.cw_min as u64) << self.stage.min(32);
        w.min(self.cw_max as u64) as u32
    }
}

#[derive(Serialize)]
struct TraceEvent<'a> {
    t: f64,
    kind: &'a str,
    stations: &'a [usize],
    busy: f64,
    idle_slots: u64,
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    d: SlotDurations,
    rng: ChaCha8Rng,
    stations: Vec<Station>,
    c: Counters,
    last_success_end: f64,
    retry_limit: u32,
    estimator: Option<Estimator>,
    trace: Option<&'a mut dyn Write>,
}

struct Estimator {
    window: u32,
    k_prime: f64,
    successes: u32,
    collisions: u64,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig, trace: Option<&'a mut dyn Write>) -> Result<Self> {
        cfg.validate()?;
        let d = cfg.timing.slot_durations()?;
        let m = cfg.station_count as usize;
        let (cw_max, retry_limit) = match &cfg.policy {
            Policy::LegacyDcf(p) => (p.cw_max, p.retry_limit),
            Policy::Abtmac { params, .. } => (params.cw_max, params.retry_limit),
            Policy::FixedWindow {
                cw_max,
                retry_limit,
                ..
            } => (*cw_max, *retry_limit),
        };
        let mut scales = vec![1.0; m];
        if let Some(qos) = &cfg.qos {
            let mut i = 0;
            for class in &qos.classes {
                for _ in 0..class.station_count {
                    scales[i] = class.backoff_scale;
                    i += 1;
                }
            }
        }
        let mut stations = Vec::with_capacity(m);
        for &scale in &scales {
            let target_lambda = match &cfg.policy {
                Policy::Abtmac { params, .. } => params.target_lambda / scale,
                _ => 0.0,
            };
            stations.push(Station {
                counter: 0,
                stage: 0,
                retries: 0,
                cw_min: 0,
                cw_max,
                target_lambda,
                queue: VecDeque::new(),
                next_arrival: f64::INFINITY,
                backoff_start: 0.0,
            });
        }
        let estimator = match &cfg.policy {
            Policy::Abtmac {
                params,
                estimate: EstimateSource::Measured { window },
            } => Some(Estimator {
                window: *window,
                k_prime: params.k_prime,
                successes: 0,
                collisions: 0,
            }),
            _ => None,
        };
        let mut engine = Engine {
            cfg,
            d,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            stations,
            c: Counters::new(m),
            last_success_end: 0.0,
            retry_limit,
            estimator,
            trace,
        };
        let oracle =
            ((cfg.station_count as f64 * cfg.estimation_error_factor).round() as u32).max(1);
        engine.apply_estimate(oracle)?;
        engine.init_traffic();
        Ok(engine)
    }

    fn apply_estimate(&mut self, m_est: u32) -> Result<()> {
        match &self.cfg.policy {
            Policy::LegacyDcf(p) => {
                for s in &mut self.stations {
                    s.cw_min = p.cw_min;
                }
            }
            Policy::FixedWindow { cw_min, .. } => {
                for s in &mut self.stations {
                    s.cw_min = *cw_min;
                }
            }
            Policy::Abtmac { params, .. } => {
                for s in &mut self.stations {
                    let p = abtmac::AbtmacParams {
                        target_lambda: s.target_lambda,
                        ..*params
                    };
                    s.cw_min = abtmac::cw_min(&p, m_est)?;
                }
            }
        }
        Ok(())
    }

    fn draw_payload(&mut self) -> f64 {
        match self.cfg.payload {
            PayloadModel::Fixed { slots } => slots,
            PayloadModel::Geometric { mean } => {
                if mean <= 1.0 {
                    return 1.0;
                }
                let p = 1.0 / mean;
                let u: f64 = self.rng.gen::<f64>();
                // inverse CDF on {1, 2, ...}
                ((1.0 - u).ln() / (1.0 - p).ln()).floor() + 1.0
            }
        }
    }

    fn draw_exp(&mut self, rate: f64) -> f64 {
        let u: f64 = self.rng.gen::<f64>();
        -(1.0 - u).ln() / rate
    }

    fn start_backoff(&mut self, i: usize, now: f64) {
        let w = self.stations[i].window();
        let counter = self.rng.gen_range(0..=w);
        let s = &mut self.stations[i];
        s.counter = counter;
        s.backoff_start = now;
    }

    fn init_traffic(&mut self) {
        match self.cfg.traffic {
            Traffic::Saturated => {
                for i in 0..self.stations.len() {
                    let payload = self.draw_payload();
                    self.stations[i].queue.push_back(Frame { payload });
                    self.start_backoff(i, 0.0);
                }
            }
            Traffic::Poisson { rate } => {
                for i in 0..self.stations.len() {
                    self.stations[i].next_arrival = self.draw_exp(rate);
                }
            }
        }
    }

    /// Moves arrivals up to `now` into the queues; idle stations that just
    /// received a frame start their backoff.
    fn admit(&mut self, now: f64) {
        let Traffic::Poisson { rate } = self.cfg.traffic else {
            return;
        };
        for i in 0..self.stations.len() {
            let was_idle = !self.stations[i].backlogged();
            while self.stations[i].next_arrival <= now {
                let payload = self.draw_payload();
                let gap = self.draw_exp(rate);
                let s = &mut self.stations[i];
                s.queue.push_back(Frame { payload });
                s.next_arrival += gap;
            }
            if was_idle && self.stations[i].backlogged() {
                self.stations[i].stage = 0;
                self.stations[i].retries = 0;
                self.start_backoff(i, now);
            }
        }
    }

    /// After a frame leaves the head of the queue (delivered or dropped).
    fn next_frame(&mut self, i: usize, now: f64) {
        let saturated = matches!(self.cfg.traffic, Traffic::Saturated);
        {
            let s = &mut self.stations[i];
            s.queue.pop_front();
            s.stage = 0;
            s.retries = 0;
        }
        if saturated {
            let payload = self.draw_payload();
            self.stations[i].queue.push_back(Frame { payload });
        }
        if self.stations[i].backlogged() {
            self.start_backoff(i, now);
        }
    }

    fn idle(&mut self, slots: u64) {
        self.c.time += slots as f64;
        self.c.idle_time += slots as f64;
        self.c.idle_slots += slots;
    }

    fn busy(&mut self, duration: f64, air: f64) {
        self.c.time += duration;
        self.c.busy_time += duration;
        self.c.airtime += air;
    }

    fn emit(
        &mut self,
        t: f64,
        kind: &str,
        stations: &[usize],
        busy: f64,
        idle_slots: u64,
    ) -> Result<()> {
        if let Some(w) = self.trace.as_mut() {
            let ev = TraceEvent {
                t,
                kind,
                stations,
                busy,
                idle_slots,
            };
            let line = serde_json::to_string(&ev).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    fn run(mut self) -> Result<(SimMetrics, Counters)> {
        let duration = self.cfg.duration;
        let warmup_end = self.cfg.warmup_fraction * duration;
        let mut snapshot: Option<Counters> = None;
        let mode = self.cfg.mode;
        let mut transmitters: Vec<usize> = Vec::with_capacity(self.stations.len());

        while self.c.time < duration {
            if snapshot.is_none() && self.c.time >= warmup_end {
                snapshot = Some(self.c.clone());
            }
            let now = self.c.time;
            let min_counter = self
                .stations
                .iter()
                .filter(|s| s.backlogged())
                .map(|s| s.counter)
                .min();
            let next_arrival = self
                .stations
                .iter()
                .filter(|s| !s.backlogged())
                .map(|s| s.next_arrival)
                .fold(f64::INFINITY, f64::min);
            // whole idle slots until an empty station receives a frame
            let arrival_slots = if next_arrival.is_finite() {
                Some(((next_arrival - now).ceil().max(1.0)) as u64)
            } else {
                None
            };

            let Some(k) = min_counter else {
                match arrival_slots {
                    Some(j) => {
                        let j = j.min((duration - now).ceil().max(1.0) as u64);
                        self.idle(j);
                        let t = self.c.time;
                        self.admit(t);
                        continue;
                    }
                    None => {
                        // nothing will ever happen again
                        let rest = (duration - now).ceil().max(1.0) as u64;
                        self.idle(rest);
                        break;
                    }
                }
            };

            if let Some(j) = arrival_slots {
                if j < k as u64 {
                    for s in self.stations.iter_mut().filter(|s| s.backlogged()) {
                        s.counter -= j as u32;
                    }
                    self.idle(j);
                    let t = self.c.time;
                    self.admit(t);
                    continue;
                }
            }

            for s in self.stations.iter_mut().filter(|s| s.backlogged()) {
                s.counter -= k;
            }
            self.idle(k as u64);
            let start = self.c.time;

            transmitters.clear();
            transmitters.extend(
                self.stations
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.backlogged() && s.counter == 0)
                    .map(|(i, _)| i),
            );
            self.c.attempts += transmitters.len() as u64;

            if transmitters.len() == 1 {
                let i = transmitters[0];
                let payload = self.stations[i].queue[0].payload;
                let busy = self.d.success_overhead(mode) + payload;
                let air = self.d.success_airtime(mode, payload);
                self.c.successes += 1;
                self.c.per_station_success[i] += 1;
                self.c.payload_delivered += payload;
                self.c.channel_delay_sum += start - self.last_success_end;
                self.c.station_delay_sum += start - self.stations[i].backoff_start;
                self.busy(busy, air);
                let end = self.c.time;
                self.last_success_end = end;
                self.emit(start, "success", &transmitters, busy, k as u64)?;
                self.admit(end);
                self.next_frame(i, end);
                self.observe_success()?;
            } else {
                let longest = transmitters
                    .iter()
                    .map(|&i| self.stations[i].queue[0].payload)
                    .fold(0.0, f64::max);
                let busy = self.d.collision_busy(mode, longest);
                let air = self.d.collision_airtime(mode, longest);
                self.c.collisions += 1;
                if let Some(e) = self.estimator.as_mut() {
                    e.collisions += 1;
                }
                self.busy(busy, air);
                let end = self.c.time;
                self.emit(start, "collision", &transmitters, busy, k as u64)?;
                self.admit(end);
                for &i in &transmitters {
                    self.stations[i].retries += 1;
                    if self.stations[i].retries > self.retry_limit {
                        self.c.drops += 1;
                        self.emit(end, "drop", &[i], 0.0, 0)?;
                        self.next_frame(i, end);
                    } else {
                        self.stations[i].stage += 1;
                        let w = self.stations[i].window();
                        self.stations[i].counter = self.rng.gen_range(0..=w);
                    }
                }
            }
        }

        let start = snapshot.unwrap_or_else(|| Counters::new(self.stations.len()));
        let window = self.c.since(&start);
        let metrics = SimMetrics::from_counters(&window, self.cfg.timing.channel_rate);
        Ok((metrics, self.c))
    }

    fn observe_success(&mut self) -> Result<()> {
        let Some(e) = self.estimator.as_mut() else {
            return Ok(());
        };
        e.successes += 1;
        if e.successes < e.window {
            return Ok(());
        }
        let n_bar = e.collisions as f64 / e.successes as f64;
        let m_est = abtmac::estimate_active_nodes(n_bar, e.k_prime)?;
        e.successes = 0;
        e.collisions = 0;
        self.apply_estimate(m_est)
    }
}

/// Runs one simulation.
pub fn run(config: &SimConfig) -> Result<SimMetrics> {
    Ok(Engine::new(config, None)?.run()?.0)
}

/// Runs one simulation and writes every channel event as a JSON line.
pub fn run_traced(config: &SimConfig, sink: &mut dyn Write) -> Result<SimMetrics> {
    Ok(Engine::new(config, Some(sink))?.run()?.0)
}

/// Clock totals of a whole run, warm-up included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBudget {
    pub idle: f64,
    pub busy: f64,
    /// clock value when the loop stopped; overshoots the duration by at most
    /// one busy period
    pub end: f64,
}

pub fn run_with_budget(config: &SimConfig) -> Result<(SimMetrics, TimeBudget)> {
    let (metrics, c) = Engine::new(config, None)?.run()?;
    Ok((
        metrics,
        TimeBudget {
            idle: c.idle_time,
            busy: c.busy_time,
            end: c.time,
        },
    ))
}
