//! Fluid-model analysis, adaptive backoff tuning and a slotted contention
//! simulator for IEEE 802.11 DCF.

pub mod abtmac;
pub mod analytic;
pub mod cli;
pub mod design;
pub mod error;
pub mod legacy;
pub mod numeric;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod timing;

pub use error::{Error, Result};
