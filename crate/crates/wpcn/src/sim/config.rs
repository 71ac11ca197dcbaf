//! Scenario configuration: a TOML file with `[topology]`, `[policy]`, and
//! `[run]` sections. Powers are accepted in watts (`*_w`) or dBm (`*_dbm`);
//! dBm values are converted at parse time. Parse errors from the TOML layer
//! carry line/column positions; semantic errors name the offending field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::Topology;
use crate::policy_fair::Utility;

use super::SimError;

/// Which policy drives the run, with its resolved parameters (all watts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PolicySpec {
    /// Threshold policy with Monte-Carlo calibrated threshold.
    Optimal { p_avg: f64, p_peak: f64 },
    /// Drift-plus-penalty policy.
    Mdpp { p_avg: f64, p_peak: f64, v: f64 },
    /// QoS-aware fair power transfer.
    QfWpt { p_avg: f64, p_peak: f64, p_min: f64, v: f64, utility: Utility },
    /// Joint downlink power / uplink information policy.
    QgfIt { p_avg: f64, p_peak: f64, d_min: f64, v: f64, utility: Utility },
}

impl PolicySpec {
    pub fn p_avg(&self) -> f64 {
        match self {
            PolicySpec::Optimal { p_avg, .. }
            | PolicySpec::Mdpp { p_avg, .. }
            | PolicySpec::QfWpt { p_avg, .. }
            | PolicySpec::QgfIt { p_avg, .. } => *p_avg,
        }
    }

    pub fn p_peak(&self) -> f64 {
        match self {
            PolicySpec::Optimal { p_peak, .. }
            | PolicySpec::Mdpp { p_peak, .. }
            | PolicySpec::QfWpt { p_peak, .. }
            | PolicySpec::QgfIt { p_peak, .. } => *p_peak,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Optimal { .. } => "optimal",
            PolicySpec::Mdpp { .. } => "mdpp",
            PolicySpec::QfWpt { .. } => "qf-wpt",
            PolicySpec::QgfIt { .. } => "qgf-it",
        }
    }
}

/// A fully resolved scenario: topology, policy, horizon, and seeding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub topology: Topology,
    pub policy: PolicySpec,
    /// Number of timeslots L.
    pub horizon: usize,
    /// Seed for the run's channel generator. The optimal policy's threshold
    /// calibration uses an independent stream derived from the same seed.
    pub seed: u64,
    /// Monte-Carlo samples for threshold calibration (optimal policy only).
    pub calibration_samples: usize,
    /// Keep the per-slot trace in memory (required for CSV export of rows).
    pub trace: bool,
    /// Output directory for `export`.
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let raw: RawConfig = toml::from_str(text)?;
        raw.resolve()
    }

    pub fn from_path(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.topology.validate().map_err(|e| SimError::Config(e.to_string()))?;
        if self.horizon < 1 {
            return Err(SimError::Config("run.horizon must be at least 1".into()));
        }
        let (p_avg, p_peak) = (self.policy.p_avg(), self.policy.p_peak());
        if !(p_avg > 0.0 && p_avg <= p_peak) {
            return Err(SimError::Config(format!(
                "policy powers must satisfy 0 < p_avg <= p_peak, got p_avg={p_avg}, p_peak={p_peak}"
            )));
        }
        match &self.policy {
            PolicySpec::Optimal { .. } => {
                if self.calibration_samples < 1000 {
                    return Err(SimError::Config(
                        "run.calibration_samples must be at least 1000 for the optimal policy".into(),
                    ));
                }
            }
            PolicySpec::Mdpp { v, .. } => {
                if !(*v > 0.0) {
                    return Err(SimError::Config("policy.v must be positive".into()));
                }
            }
            PolicySpec::QfWpt { p_min, v, utility, .. } => {
                if !(*v > 0.0) {
                    return Err(SimError::Config("policy.v must be positive".into()));
                }
                if *p_min < 0.0 {
                    return Err(SimError::Config("policy.p_min must be nonnegative".into()));
                }
                utility.validate().map_err(|e| SimError::Config(e.to_string()))?;
            }
            PolicySpec::QgfIt { d_min, v, utility, .. } => {
                if !(*v > 0.0) {
                    return Err(SimError::Config("policy.v must be positive".into()));
                }
                if *d_min < 0.0 {
                    return Err(SimError::Config("policy.d_min must be nonnegative".into()));
                }
                utility.validate().map_err(|e| SimError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

fn power_field(name: &str, w: Option<f64>, dbm: Option<f64>) -> Result<f64, SimError> {
    match (w, dbm) {
        (Some(v), None) => Ok(v),
        (None, Some(d)) => Ok(dbm_to_watts(d)),
        (None, None) => Err(SimError::Config(format!("missing {name}_w or {name}_dbm"))),
        (Some(_), Some(_)) => {
            Err(SimError::Config(format!("give only one of {name}_w and {name}_dbm")))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    topology: RawTopology,
    policy: RawPolicy,
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    eap_position: [f64; 2],
    er_positions: Vec<[f64; 2]>,
    eap_antennas: usize,
    er_antennas: usize,
    carrier_hz: Option<f64>,
    carrier_ghz: Option<f64>,
    pathloss_exponent: f64,
    noise_w: Option<f64>,
    noise_dbm: Option<f64>,
    eta: f64,
    reciprocal_uplink: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    kind: String,
    v: Option<f64>,
    p_avg_w: Option<f64>,
    p_avg_dbm: Option<f64>,
    p_peak_w: Option<f64>,
    p_peak_dbm: Option<f64>,
    p_min_w: Option<f64>,
    p_min_dbm: Option<f64>,
    d_min: Option<f64>,
    utility: Option<String>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    horizon: usize,
    seed: u64,
    calibration_samples: Option<usize>,
    trace: Option<bool>,
    output: Option<String>,
}

impl RawConfig {
    fn resolve(self) -> Result<ScenarioConfig, SimError> {
        let carrier_hz = match (self.topology.carrier_hz, self.topology.carrier_ghz) {
            (Some(hz), None) => hz,
            (None, Some(ghz)) => ghz * 1e9,
            (None, None) => {
                return Err(SimError::Config("missing topology.carrier_hz or topology.carrier_ghz".into()))
            }
            (Some(_), Some(_)) => {
                return Err(SimError::Config("give only one of topology.carrier_hz and topology.carrier_ghz".into()))
            }
        };
        let noise = power_field("topology.noise", self.topology.noise_w, self.topology.noise_dbm)?;
        let topology = Topology {
            eap_position: self.topology.eap_position,
            er_positions: self.topology.er_positions,
            eap_antennas: self.topology.eap_antennas,
            er_antennas: self.topology.er_antennas,
            carrier_hz,
            pathloss_exponent: self.topology.pathloss_exponent,
            noise_variance: noise,
            eta: self.topology.eta,
            reciprocal_uplink: self.topology.reciprocal_uplink.unwrap_or(true),
        };

        let p_avg = power_field("policy.p_avg", self.policy.p_avg_w, self.policy.p_avg_dbm)?;
        let p_peak = power_field("policy.p_peak", self.policy.p_peak_w, self.policy.p_peak_dbm)?;
        let v = self.policy.v;
        let need_v = |v: Option<f64>| {
            v.ok_or_else(|| SimError::Config("policy.v is required for this policy".into()))
        };
        let utility = match self.policy.utility.as_deref() {
            None => Utility::Sum,
            Some("sum") => Utility::Sum,
            Some("proportional-fair") => Utility::ProportionalFair,
            Some("max-min") => Utility::MaxMin,
            Some("alpha-fair") => {
                let alpha = self
                    .policy
                    .alpha
                    .ok_or_else(|| SimError::Config("policy.alpha is required for alpha-fair".into()))?;
                Utility::AlphaFair(alpha)
            }
            Some(other) => {
                return Err(SimError::Config(format!(
                    "unknown policy.utility '{other}' (expected sum, proportional-fair, max-min, alpha-fair)"
                )))
            }
        };

        let policy = match self.policy.kind.as_str() {
            "optimal" => PolicySpec::Optimal { p_avg, p_peak },
            "mdpp" => PolicySpec::Mdpp { p_avg, p_peak, v: need_v(v)? },
            "qf-wpt" => {
                let p_min = match (self.policy.p_min_w, self.policy.p_min_dbm) {
                    (None, None) => 0.0,
                    (w, d) => power_field("policy.p_min", w, d)?,
                };
                PolicySpec::QfWpt { p_avg, p_peak, p_min, v: need_v(v)?, utility }
            }
            "qgf-it" => PolicySpec::QgfIt {
                p_avg,
                p_peak,
                d_min: self.policy.d_min.unwrap_or(0.0),
                v: need_v(v)?,
                utility,
            },
            other => {
                return Err(SimError::Config(format!(
                    "unknown policy.kind '{other}' (expected optimal, mdpp, qf-wpt, qgf-it)"
                )))
            }
        };

        let cfg = ScenarioConfig {
            topology,
            policy,
            horizon: self.run.horizon,
            seed: self.run.seed,
            calibration_samples: self.run.calibration_samples.unwrap_or(100_000),
            trace: self.run.trace.unwrap_or(false),
            output: self.run.output.map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
