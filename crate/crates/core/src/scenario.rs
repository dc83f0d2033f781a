//! TOML scenario files.
//!
//! ```toml
//! [timing]            # optional, any subset of TimingParams
//! slot = 20e-6
//!
//! [sim]
//! station_count = 20
//! mode = "rts"        # or "basic"
//! payload = 34        # slots
//! duration = 1e6
//! seed = 7
//!
//! [policy]
//! kind = "abtmac"     # "legacy" | "fixed"
//! target_lambda = 0.7
//!
//! [qos]               # optional, abtmac only
//! classes = [
//!   { id = "voice", station_count = 4, backoff_scale = 0.25 },
//!   { id = "data", station_count = 16, backoff_scale = 1.1875 },
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::abtmac::{AbtmacParams, QosClassSpec};
use crate::design::recommended_rate;
use crate::error::{Error, Result};
use crate::legacy::DcfParams;
use crate::sim::{
    EstimateSource, PayloadModel, Policy, SimConfig, Traffic, DEFAULT_ESTIMATION_WINDOW,
    DEFAULT_WARMUP_FRACTION,
};
use crate::timing::{AccessMode, TimingParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub timing: TimingParams,
    pub sim: SimSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub qos: Option<QosClassSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub station_count: u32,
    pub mode: String,
    /// Fixed payload, or the mean when `payload_model = "geometric"`.
    pub payload: f64,
    pub payload_model: String,
    pub traffic: String,
    /// frames per slot per station, Poisson traffic only
    pub poisson_rate: Option<f64>,
    pub duration: f64,
    pub seed: u64,
    pub estimation_error_factor: f64,
    pub warmup_fraction: f64,
    pub replications: u32,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            station_count: 20,
            mode: "rts".into(),
            payload: 34.0,
            payload_model: "fixed".into(),
            traffic: "saturated".into(),
            poisson_rate: None,
            duration: 1.0e6,
            seed: 1,
            estimation_error_factor: 1.0,
            warmup_fraction: DEFAULT_WARMUP_FRACTION,
            replications: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    pub kind: String,
    /// Defaults to the recommended rate of the access mode.
    pub target_lambda: Option<f64>,
    pub k_const: f64,
    pub k_prime: f64,
    pub cw_min: Option<u32>,
    pub cw_max: Option<u32>,
    pub retry_limit: Option<u32>,
    /// "oracle" or "measured"
    pub estimate: String,
    pub estimation_window: u32,
}

impl Default for PolicySection {
    fn default() -> Self {
        let p = AbtmacParams::default();
        PolicySection {
            kind: "abtmac".into(),
            target_lambda: None,
            k_const: p.k_const,
            k_prime: p.k_prime,
            cw_min: None,
            cw_max: None,
            retry_limit: None,
            estimate: "oracle".into(),
            estimation_window: DEFAULT_ESTIMATION_WINDOW,
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Builds and validates the simulator configuration.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.sim;
        let mode: AccessMode = s
            .mode
            .parse()
            .map_err(|_| Error::invalid("sim.mode", format!("unknown access mode `{}`", s.mode)))?;
        let payload = match s.payload_model.as_str() {
            "fixed" => PayloadModel::Fixed { slots: s.payload },
            "geometric" => PayloadModel::Geometric { mean: s.payload },
            other => {
                return Err(Error::invalid(
                    "sim.payload_model",
                    format!("expected `fixed` or `geometric`, got `{other}`"),
                ))
            }
        };
        let traffic = match (s.traffic.as_str(), s.poisson_rate) {
            ("saturated", None) => Traffic::Saturated,
            ("saturated", Some(_)) => {
                return Err(Error::invalid(
                    "sim.poisson_rate",
                    "only valid with poisson traffic",
                ))
            }
            ("poisson", Some(rate)) => Traffic::Poisson { rate },
            ("poisson", None) => {
                return Err(Error::invalid(
                    "sim.poisson_rate",
                    "required for poisson traffic",
                ))
            }
            (other, _) => {
                return Err(Error::invalid(
                    "sim.traffic",
                    format!("expected `saturated` or `poisson`, got `{other}`"),
                ))
            }
        };
        let policy = self.policy.build(mode)?;
        let cfg = SimConfig {
            station_count: s.station_count,
            mode,
            policy,
            payload,
            traffic,
            duration: s.duration,
            seed: s.seed,
            estimation_error_factor: s.estimation_error_factor,
            warmup_fraction: s.warmup_fraction,
            timing: self.timing,
            qos: self.qos.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl PolicySection {
    fn build(&self, mode: AccessMode) -> Result<Policy> {
        match self.kind.as_str() {
            "abtmac" => {
                if self.cw_min.is_some() {
                    return Err(Error::invalid(
                        "policy.cw_min",
                        "abtmac derives cw_min itself",
                    ));
                }
                let d = AbtmacParams::default();
                let params = AbtmacParams {
                    target_lambda: self.target_lambda.unwrap_or(recommended_rate(mode).0),
                    k_const: self.k_const,
                    k_prime: self.k_prime,
                    cw_max: self.cw_max.unwrap_or(d.cw_max),
                    retry_limit: self.retry_limit.unwrap_or(d.retry_limit),
                };
                let estimate = match self.estimate.as_str() {
                    "oracle" => EstimateSource::Oracle,
                    "measured" => EstimateSource::Measured {
                        window: self.estimation_window,
                    },
                    other => {
                        return Err(Error::invalid(
                            "policy.estimate",
                            format!("expected `oracle` or `measured`, got `{other}`"),
                        ))
                    }
                };
                Ok(Policy::Abtmac { params, estimate })
            }
            "legacy" => {
                self.reject_abtmac_fields()?;
                let d = DcfParams::default();
                Ok(Policy::LegacyDcf(DcfParams {
                    cw_min: self.cw_min.unwrap_or(d.cw_min),
                    cw_max: self.cw_max.unwrap_or(d.cw_max),
                    retry_limit: self.retry_limit.unwrap_or(d.retry_limit),
                }))
            }
            "fixed" => {
                self.reject_abtmac_fields()?;
                let cw_min = self.cw_min.ok_or_else(|| {
                    Error::invalid("policy.cw_min", "required for the fixed policy")
                })?;
                Ok(Policy::FixedWindow {
                    cw_min,
                    cw_max: self.cw_max.unwrap_or(cw_min),
                    retry_limit: self.retry_limit.unwrap_or(DcfParams::default().retry_limit),
                })
            }
            other => Err(Error::invalid(
                "policy.kind",
                format!("expected `abtmac`, `legacy` or `fixed`, got `{other}`"),
            )),
        }
    }

    fn reject_abtmac_fields(&self) -> Result<()> {
        if self.target_lambda.is_some() {
            return Err(Error::invalid(
                "policy.target_lambda",
                format!("not used by the {} policy", self.kind),
            ));
        }
        Ok(())
    }
}

/// Reads timing parameters from a file holding a `[timing]` table.
pub fn load_timing(path: impl AsRef<Path>) -> Result<TimingParams> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct TimingFile {
        #[serde(default)]
        timing: TimingParams,
    }
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let file: TimingFile =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    file.timing.validate()?;
    Ok(file.timing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let s = Scenario::from_toml("[sim]\nstation_count = 10\nmode = \"basic\"\n").unwrap();
        let c = s.sim_config().unwrap();
        assert_eq!(c.station_count, 10);
        assert_eq!(c.mode, AccessMode::BasicAccess);
        match c.policy {
            Policy::Abtmac { params, .. } => assert_eq!(params.target_lambda, 0.55),
            other => panic!("unexpected policy {other:?}"),
        }
    }

    #[test]
    fn full_scenario() {
        let text = r#"
[timing]
channel_rate = 2e6

[sim]
station_count = 20
payload = 40
payload_model = "geometric"
traffic = "poisson"
poisson_rate = 0.002
duration = 5e4
seed = 9

[policy]
kind = "abtmac"
target_lambda = 0.6
estimate = "measured"
estimation_window = 200

[qos]
classes = [
  { id = "voice", station_count = 4, backoff_scale = 0.25 },
  { id = "data", station_count = 16, backoff_scale = 1.1875 },
]
"#;
        let c = Scenario::from_toml(text).unwrap().sim_config().unwrap();
        assert_eq!(c.timing.channel_rate, 2e6);
        assert_eq!(c.payload, PayloadModel::Geometric { mean: 40.0 });
        assert_eq!(c.traffic, Traffic::Poisson { rate: 0.002 });
        assert_eq!(c.qos.as_ref().unwrap().classes.len(), 2);
        assert!(matches!(
            c.policy,
            Policy::Abtmac {
                estimate: EstimateSource::Measured { window: 200 },
                ..
            }
        ));
    }

    #[test]
    fn unknown_key_is_config_error() {
        let e = Scenario::from_toml("[sim]\nstations = 3\n").unwrap_err();
        match e {
            Error::Config(msg) => assert!(msg.contains("stations"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_name_the_field() {
        let field = |text: &str| match Scenario::from_toml(text).unwrap().sim_config() {
            Err(Error::InvalidParameter { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field("[sim]\nmode = \"dcf\"\n"), "sim.mode");
        assert_eq!(field("[sim]\ntraffic = \"poisson\"\n"), "sim.poisson_rate");
        assert_eq!(field("[sim]\nduration = 10\n"), "sim.duration");
        assert_eq!(
            field("[sim]\n[policy]\nkind = \"fixed\"\n"),
            "policy.cw_min"
        );
        assert_eq!(field("[sim]\n[policy]\nkind = \"aloha\"\n"), "policy.kind");
        assert_eq!(
            field("[sim]\n[policy]\nkind = \"legacy\"\ncw_min = 32\ncw_max = 1000\n"),
            "policy.cw_max"
        );
    }
}
