use serde::{Deserialize, Serialize};

/// Raw counters accumulated by the event loop. Metrics are computed from the
/// difference between the final counters and a snapshot taken at the end of
/// the warm-up.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Counters {
    pub time: f64,
    pub idle_time: f64,
    pub busy_time: f64,
    pub airtime: f64,
    pub idle_slots: u64,
    pub successes: u64,
    pub collisions: u64,
    pub attempts: u64,
    pub drops: u64,
    pub payload_delivered: f64,
    pub channel_delay_sum: f64,
    pub station_delay_sum: f64,
    pub per_station_success: Vec<u64>,
}

impl Counters {
    pub fn new(stations: usize) -> Self {
        Counters {
            per_station_success: vec![0; stations],
            ..Default::default()
        }
    }

    pub fn since(&self, start: &Counters) -> Counters {
        Counters {
            time: self.time - start.time,
            idle_time: self.idle_time - start.idle_time,
            busy_time: self.busy_time - start.busy_time,
            airtime: self.airtime - start.airtime,
            idle_slots: self.idle_slots - start.idle_slots,
            successes: self.successes - start.successes,
            collisions: self.collisions - start.collisions,
            attempts: self.attempts - start.attempts,
            drops: self.drops - start.drops,
            payload_delivered: self.payload_delivered - start.payload_delivered,
            channel_delay_sum: self.channel_delay_sum - start.channel_delay_sum,
            station_delay_sum: self.station_delay_sum - start.station_delay_sum,
            per_station_success: self
                .per_station_success
                .iter()
                .zip(&start.per_station_success)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Measured counterparts of the model quantities over the post-warm-up window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    /// delivered payload slots per slot
    pub normalized_throughput: f64,
    pub throughput_bps: f64,
    /// Channel-level access delay in slots: from the end of one successful
    /// exchange to the first bit of the next.
    pub mean_access_delay: f64,
    /// Per-frame delay in slots from the start of the frame's backoff to the
    /// first bit of its successful transmission. Dropped frames excluded.
    pub station_access_delay: f64,
    pub mean_collisions_per_service: f64,
    /// Fraction of transmission events that were collisions.
    pub collision_probability: f64,
    /// Slots with frame bits on the air over all slots.
    pub slot_utilization: f64,
    /// Station transmission attempts per backoff-slot opportunity.
    pub attempt_rate: f64,
    pub successes: u64,
    pub collisions: u64,
    pub drops: u64,
    pub idle_slots: u64,
    /// Length of the measurement window in slots.
    pub elapsed: f64,
    pub per_station_success: Vec<u64>,
}

impl SimMetrics {
    pub(crate) fn from_counters(c: &Counters, channel_rate: f64) -> Self {
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        let succ = c.successes as f64;
        let events = (c.successes + c.collisions) as f64;
        let normalized_throughput = ratio(c.payload_delivered, c.time);
        SimMetrics {
            normalized_throughput,
            throughput_bps: normalized_throughput * channel_rate,
            mean_access_delay: ratio(c.channel_delay_sum, succ),
            station_access_delay: ratio(c.station_delay_sum, succ),
            mean_collisions_per_service: ratio(c.collisions as f64, succ),
            collision_probability: ratio(c.collisions as f64, events),
            slot_utilization: ratio(c.airtime, c.time),
            attempt_rate: ratio(c.attempts as f64, c.idle_slots as f64 + events),
            successes: c.successes,
            collisions: c.collisions,
            drops: c.drops,
            idle_slots: c.idle_slots,
            elapsed: c.time,
            per_station_success: c.per_station_success.clone(),
        }
    }

    /// Jain's fairness index over per-station successes.
    pub fn jain_index(&self) -> f64 {
        jain_index(&self.per_station_success)
    }
}

/// `(Σx)² / (n · Σx²)`; 1 for a perfectly even split, `1/n` when one
/// station gets everything.
pub fn jain_index(values: &[u64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let sum: f64 = values.iter().map(|&v| v as f64).sum();
    let sq: f64 = values.iter().map(|&v| (v as f64) * (v as f64)).sum();
    if sq == 0.0 {
        return 1.0;
    }
    sum * sum / (values.len() as f64 * sq)
}
