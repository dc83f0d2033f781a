//! PHY/MAC timing parameters and their conversion into slot units.
//!
//! Every closed form in this crate works in slots. Durations that are
//! carried as bit counts are turned into slots by `bits / rate / slot`, so
//! fractional slots are normal (DIFS is 2.5 slots with the defaults).
//!
//! Frame durations (`t_rts`, `t_cts`, `t_ack`) count MAC-frame bits only.
//! PHY preamble and header are charged once, inside EIFS. Payload lengths
//! handed to the model and the simulator exclude all header overhead.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel access mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessMode {
    /// DATA/ACK only. Collisions cost a full frame.
    BasicAccess,
    /// RTS/CTS/DATA/ACK. Collisions cost one RTS.
    RtsCts,
}

impl AccessMode {
    pub const ALL: [AccessMode; 2] = [AccessMode::BasicAccess, AccessMode::RtsCts];

    pub fn as_str(&self) -> &'static str {
        match self {
            AccessMode::BasicAccess => "basic",
            AccessMode::RtsCts => "rts",
        }
    }
}

impl fmt::Display for AccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AccessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basic" | "basic_access" | "basicaccess" => Ok(AccessMode::BasicAccess),
            "rts" | "rts_cts" | "rtscts" => Ok(AccessMode::RtsCts),
            other => Err(Error::invalid(
                "mode",
                format!("unknown access mode `{other}` (expected `basic` or `rts`)"),
            )),
        }
    }
}

/// IEEE 802.11 system parameters. Defaults are the 1 Mb/s DSSS set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingParams {
    /// bits per second
    pub channel_rate: f64,
    /// seconds
    pub slot: f64,
    /// seconds
    pub sifs: f64,
    /// seconds
    pub difs: f64,
    pub phy_preamble_bits: f64,
    pub phy_header_bits: f64,
    pub mac_header_bits: f64,
    pub ack_bits: f64,
    pub rts_bits: f64,
    pub cts_bits: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        TimingParams {
            channel_rate: 1.0e6,
            slot: 20e-6,
            sifs: 10e-6,
            difs: 50e-6,
            phy_preamble_bits: 144.0,
            phy_header_bits: 48.0,
            mac_header_bits: 224.0,
            ack_bits: 112.0,
            rts_bits: 160.0,
            cts_bits: 112.0,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("channel_rate", self.channel_rate),
            ("slot", self.slot),
            ("sifs", self.sifs),
            ("difs", self.difs),
            ("phy_preamble_bits", self.phy_preamble_bits),
            ("phy_header_bits", self.phy_header_bits),
            ("mac_header_bits", self.mac_header_bits),
            ("ack_bits", self.ack_bits),
            ("rts_bits", self.rts_bits),
            ("cts_bits", self.cts_bits),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    format!("timing.{name}"),
                    format!("must be strictly positive, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Bits carried by one slot at the channel rate.
    pub fn bits_per_slot(&self) -> f64 {
        self.channel_rate * self.slot
    }

    pub fn bits_to_slots(&self, bits: f64) -> f64 {
        bits / self.channel_rate / self.slot
    }

    pub fn seconds_to_slots(&self, secs: f64) -> f64 {
        secs / self.slot
    }

    pub fn slots_to_micros(&self, slots: f64) -> f64 {
        slots * self.slot * 1e6
    }

    /// Payload length in slots for a payload of `bytes` (headers excluded).
    pub fn payload_bytes_to_slots(&self, bytes: f64) -> f64 {
        self.bits_to_slots(bytes * 8.0)
    }

    /// Converts every protocol duration to slots.
    pub fn slot_durations(&self) -> Result<SlotDurations> {
        self.validate()?;
        let sifs = self.seconds_to_slots(self.sifs);
        let difs = self.seconds_to_slots(self.difs);
        let t_ack = self.bits_to_slots(self.ack_bits);
        let phy_overhead = self.bits_to_slots(self.phy_preamble_bits + self.phy_header_bits);
        Ok(SlotDurations {
            t_rts: self.bits_to_slots(self.rts_bits),
            t_cts: self.bits_to_slots(self.cts_bits),
            t_ack,
            sifs,
            difs,
            eifs: sifs + phy_overhead + t_ack + difs,
            phy_overhead,
        })
    }
}

/// Protocol durations in slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotDurations {
    pub t_rts: f64,
    pub t_cts: f64,
    pub t_ack: f64,
    pub sifs: f64,
    pub difs: f64,
    pub eifs: f64,
    pub phy_overhead: f64,
}

impl Default for SlotDurations {
    fn default() -> Self {
        TimingParams::default()
            .slot_durations()
            .expect("default timing is valid")
    }
}

impl SlotDurations {
    /// Fixed part of a successful frame service: everything except the
    /// idle backoff and the payload. 23.2 (RTS/CTS) and 8.6 (basic) slots
    /// with the default timing.
    pub fn success_overhead(&self, mode: AccessMode) -> f64 {
        match mode {
            AccessMode::RtsCts => {
                self.t_rts + self.t_cts + self.t_ack + self.difs + 3.0 * self.sifs
            }
            AccessMode::BasicAccess => self.t_ack + self.difs + self.sifs,
        }
    }

    /// Busy time of one collision, excluding the idle backoff before it.
    pub fn collision_busy(&self, mode: AccessMode, payload: f64) -> f64 {
        match mode {
            AccessMode::RtsCts => self.t_rts + self.eifs,
            AccessMode::BasicAccess => payload + self.eifs,
        }
    }

    /// Channel time during which frame bits are on the air in a successful exchange.
    pub fn success_airtime(&self, mode: AccessMode, payload: f64) -> f64 {
        match mode {
            AccessMode::RtsCts => self.t_rts + self.t_cts + payload + self.t_ack,
            AccessMode::BasicAccess => payload + self.t_ack,
        }
    }

    /// Channel time during which frame bits are on the air in a collision.
    pub fn collision_airtime(&self, mode: AccessMode, payload: f64) -> f64 {
        match mode {
            AccessMode::RtsCts => self.t_rts,
            AccessMode::BasicAccess => payload,
        }
    }
}
