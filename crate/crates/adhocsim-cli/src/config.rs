//! Experiment configuration: JSON schema, defaults, and validation.
//!
//! A config file is a JSON object whose keys mirror [`ExperimentConfig`]
//! exactly; unknown keys are rejected. Every field except `n_list` and
//! `q_list` has a default, and each experiment kind also ships a complete
//! built-in config used when no file is given.

use adhocsim::channel::ChannelParams;
use adhocsim::mac::{Antenna, MacParams};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("config kind `{config}` does not match the `{requested}` subcommand")]
    KindMismatch { config: String, requested: String },
}

/// The experiment families the runner knows how to execute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Connectivity probability over a radius sweep, with the empirical
    /// 50%-crossing radius per `(n, q)`.
    ConnectivitySweep,
    /// Connectivity under the sampled channel model over a sweep of
    /// radius-equivalent operating points and path-loss exponents.
    ChannelConnectivity,
    /// Full pipeline (deploy, tile, pair, schedule, route) reporting
    /// capacity, delay, loads, and occupancy.
    CapacityScaling,
    /// Same pipeline as capacity-scaling; kept as its own kind so delay
    /// sweeps are labelled and post-processed as such.
    DelayScaling,
    /// Same pipeline, reported with the capacity/delay ratio in focus.
    Tradeoff,
    /// Redundancy-node sizing over an `(n, q)` grid.
    Redundancy,
    /// Per-cell occupancy statistics of the tiling.
    Occupancy,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::ConnectivitySweep => "connectivity-sweep",
            ExperimentKind::ChannelConnectivity => "channel-connectivity",
            ExperimentKind::CapacityScaling => "capacity-scaling",
            ExperimentKind::DelayScaling => "delay-scaling",
            ExperimentKind::Tradeoff => "tradeoff",
            ExperimentKind::Redundancy => "redundancy",
            ExperimentKind::Occupancy => "occupancy",
        }
    }
}

/// Transmission radii for a sweep: either explicit values or multiples of
/// the closed-form critical radius for each `(n, q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusSpec {
    /// Radii in unit-square units.
    Explicit(Vec<f64>),
    /// Multipliers applied to `sqrt(ln n / ((1-q) n))`.
    Auto(Vec<f64>),
}

impl RadiusSpec {
    pub fn resolve(&self, n: usize, q: f64) -> Result<Vec<f64>, ConfigError> {
        match self {
            RadiusSpec::Explicit(radii) => Ok(radii.clone()),
            RadiusSpec::Auto(multipliers) => {
                let base = adhocsim::topology::critical_radius_closed_form(n, q, 0.0)
                    .map_err(|e| ConfigError::Field {
                        field: "radius",
                        reason: e.to_string(),
                    })?;
                Ok(multipliers.iter().map(|m| m * base).collect())
            }
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let values = match self {
            RadiusSpec::Explicit(v) | RadiusSpec::Auto(v) => v,
        };
        if values.is_empty() {
            return Err(ConfigError::Field {
                field: "radius",
                reason: "needs at least one value".into(),
            });
        }
        if values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(ConfigError::Field {
                field: "radius",
                reason: "values must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

impl Default for RadiusSpec {
    fn default() -> Self {
        // 1.2x the closed form sits inside the connected-w.h.p. regime while
        // keeping cell loads realistic.
        RadiusSpec::Auto(vec![1.2])
    }
}

/// MAC parameters as they appear in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// `"omnidirectional"` or `"directional"`.
    #[serde(default = "default_antenna")]
    pub antenna: String,
    /// Beamwidth in radians; required iff the antenna is directional.
    #[serde(default)]
    pub beamwidth: Option<f64>,
    /// Bits per active slot (`W`).
    #[serde(default = "default_slot_bits")]
    pub slot_bits: f64,
}

fn default_delta() -> f64 {
    1.0
}
fn default_antenna() -> String {
    "omnidirectional".into()
}
fn default_slot_bits() -> f64 {
    1.0
}

impl Default for MacConfig {
    fn default() -> Self {
        MacConfig {
            delta: default_delta(),
            antenna: default_antenna(),
            beamwidth: None,
            slot_bits: default_slot_bits(),
        }
    }
}

impl MacConfig {
    pub fn to_params(&self) -> Result<MacParams, ConfigError> {
        let antenna = match self.antenna.as_str() {
            "omnidirectional" => Antenna::Omnidirectional,
            "directional" => match self.beamwidth {
                Some(beamwidth) => Antenna::Directional { beamwidth },
                None => {
                    return Err(ConfigError::Field {
                        field: "mac.beamwidth",
                        reason: "required for a directional antenna".into(),
                    })
                }
            },
            other => {
                return Err(ConfigError::Field {
                    field: "mac.antenna",
                    reason: format!("unknown antenna type `{other}`"),
                })
            }
        };
        let params = MacParams {
            delta: self.delta,
            antenna,
            slot_bits: self.slot_bits,
        };
        adhocsim::mac::effective_delta(&params).map_err(|e| ConfigError::Field {
            field: "mac",
            reason: e.to_string(),
        })?;
        Ok(params)
    }
}

/// Channel parameters as they appear in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Fixed transmit power. When omitted, the power is derived per sweep
    /// point so that the first path-loss exponent's deterministic reach
    /// equals the resolved radius.
    #[serde(default)]
    pub tx_power_dbm: Option<f64>,
    #[serde(default = "default_min_rx")]
    pub min_rx_power_dbm: f64,
    /// Path-loss exponents to sweep; the first is the reference used to
    /// derive transmit powers.
    #[serde(default = "default_alpha_list")]
    pub alpha_list: Vec<f64>,
    #[serde(default = "default_sigma")]
    pub shadowing_sigma_db: f64,
    #[serde(default = "default_fading")]
    pub fading: bool,
    #[serde(default = "default_min_distance")]
    pub min_distance: f64,
    /// Physical length of the unit-square side. Above 1, inter-node
    /// distances exceed one unit and steeper path loss reduces connectivity.
    #[serde(default = "default_distance_scale")]
    pub distance_scale: f64,
    #[serde(default = "default_noise")]
    pub noise_power: f64,
    #[serde(default = "default_beta")]
    pub sinr_threshold: f64,
    #[serde(default)]
    pub literal_fading_sum: bool,
}

fn default_min_rx() -> f64 {
    -80.0
}
fn default_alpha_list() -> Vec<f64> {
    vec![2.5, 3.5]
}
fn default_sigma() -> f64 {
    5.0
}
fn default_fading() -> bool {
    true
}
fn default_min_distance() -> f64 {
    1e-4
}
fn default_distance_scale() -> f64 {
    1000.0
}
fn default_noise() -> f64 {
    1.0
}
fn default_beta() -> f64 {
    1.0
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            tx_power_dbm: None,
            min_rx_power_dbm: default_min_rx(),
            alpha_list: default_alpha_list(),
            shadowing_sigma_db: default_sigma(),
            fading: default_fading(),
            min_distance: default_min_distance(),
            distance_scale: default_distance_scale(),
            noise_power: default_noise(),
            sinr_threshold: default_beta(),
            literal_fading_sum: false,
        }
    }
}

impl ChannelConfig {
    /// Channel parameters for one exponent and transmit power.
    pub fn to_params(&self, alpha: f64, tx_power_dbm: f64) -> ChannelParams {
        ChannelParams {
            tx_power_dbm,
            min_rx_power_dbm: self.min_rx_power_dbm,
            path_loss_exp: alpha,
            shadowing_sigma_db: self.shadowing_sigma_db,
            fading: self.fading,
            min_distance: self.min_distance,
            distance_scale: self.distance_scale,
            noise_power: self.noise_power,
            sinr_threshold: self.sinr_threshold,
            literal_fading_sum: self.literal_fading_sum,
        }
    }

    /// Transmit power whose deterministic reach at the reference exponent
    /// equals `r_equiv` (unit-square units).
    pub fn tx_power_for_reach(&self, r_equiv: f64) -> f64 {
        let alpha_ref = self.alpha_list[0];
        self.min_rx_power_dbm + 10.0 * alpha_ref * (r_equiv * self.distance_scale).log10()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.alpha_list.is_empty() {
            return Err(ConfigError::Field {
                field: "channel.alpha_list",
                reason: "needs at least one exponent".into(),
            });
        }
        if self.shadowing_sigma_db < 0.0 {
            return Err(ConfigError::Field {
                field: "channel.shadowing_sigma_db",
                reason: "must be nonnegative".into(),
            });
        }
        if !self.min_distance.is_finite() || self.min_distance <= 0.0 {
            return Err(ConfigError::Field {
                field: "channel.min_distance",
                reason: "must be positive".into(),
            });
        }
        if !self.distance_scale.is_finite() || self.distance_scale <= 0.0 {
            return Err(ConfigError::Field {
                field: "channel.distance_scale",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// One experiment: a sweep over `n_list` x `q_list` (x radii).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: Option<ExperimentKind>,
    pub n_list: Vec<usize>,
    pub q_list: Vec<f64>,
    #[serde(default)]
    pub radius: RadiusSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub mac: MacConfig,
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads; 0 means one per logical CPU.
    #[serde(default)]
    pub workers: usize,
}

fn default_trials() -> usize {
    1
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Parse a config file, rejecting unknown keys.
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    /// The kind this config runs as; set from the subcommand when absent.
    pub fn kind(&self) -> Result<ExperimentKind, ConfigError> {
        self.kind.ok_or(ConfigError::Field {
            field: "kind",
            reason: "not set (pass a subcommand or a `kind` key)".into(),
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let kind = self.kind()?;
        if self.n_list.is_empty() {
            return Err(ConfigError::Field {
                field: "n_list",
                reason: "needs at least one node count".into(),
            });
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return Err(ConfigError::Field {
                field: "n_list",
                reason: "node counts must be at least 2".into(),
            });
        }
        if self.q_list.is_empty() {
            return Err(ConfigError::Field {
                field: "q_list",
                reason: "needs at least one failure probability".into(),
            });
        }
        if self.q_list.iter().any(|&q| !(0.0..1.0).contains(&q)) {
            return Err(ConfigError::Field {
                field: "q_list",
                reason: "failure probabilities must lie in [0, 1)".into(),
            });
        }
        if kind == ExperimentKind::Redundancy && self.q_list.contains(&0.0) {
            return Err(ConfigError::Field {
                field: "q_list",
                reason: "redundancy sizing needs q > 0".into(),
            });
        }
        if self.trials < 1 {
            return Err(ConfigError::Field {
                field: "trials",
                reason: "must be at least 1".into(),
            });
        }
        self.radius.validate()?;
        self.mac.to_params()?;
        if let Some(channel) = &self.channel {
            channel.validate()?;
        }
        Ok(())
    }
}

/// The built-in config for each experiment kind, sized to reproduce the
/// standard sweeps on a laptop.
pub fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    let base = ExperimentConfig {
        kind: Some(kind),
        n_list: vec![1000],
        q_list: vec![0.0],
        radius: RadiusSpec::default(),
        trials: 1,
        base_seed: 0,
        mac: MacConfig::default(),
        channel: None,
        out_dir: default_out_dir(),
        workers: 0,
    };
    match kind {
        ExperimentKind::ConnectivitySweep => ExperimentConfig {
            q_list: vec![0.3, 0.5, 0.9],
            radius: RadiusSpec::Auto((0..21).map(|i| 0.4 + 0.11 * i as f64).collect()),
            trials: 1000,
            ..base
        },
        ExperimentKind::ChannelConnectivity => ExperimentConfig {
            radius: RadiusSpec::Auto((0..13).map(|i| 0.5 + 0.2 * i as f64).collect()),
            trials: 200,
            channel: Some(ChannelConfig::default()),
            ..base
        },
        ExperimentKind::CapacityScaling | ExperimentKind::DelayScaling | ExperimentKind::Tradeoff => {
            ExperimentConfig {
                n_list: vec![500, 1000, 2000, 4000, 8000],
                q_list: vec![0.0, 0.2, 0.4],
                trials: 30,
                ..base
            }
        }
        ExperimentKind::Redundancy => ExperimentConfig {
            n_list: vec![100, 1000, 10_000, 100_000],
            q_list: (1..=10).map(|i| 0.05 * i as f64).collect(),
            ..base
        },
        ExperimentKind::Occupancy => ExperimentConfig {
            n_list: vec![500, 1000, 2000, 4000, 8000],
            q_list: vec![0.0, 0.2, 0.4],
            radius: RadiusSpec::Auto(vec![1.0]),
            trials: 100,
            ..base
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"n_list": [100], "q_list": [0.2]}"#).unwrap();
        assert_eq!(cfg.trials, 1);
        assert_eq!(cfg.radius, RadiusSpec::Auto(vec![1.2]));
        assert_eq!(cfg.workers, 0);
        assert!(cfg.kind.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_json(
            r#"{"n_list": [100], "q_list": [0.2], "trails": 5}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("trails"), "{err}");
    }

    #[test]
    fn kind_round_trips_kebab_case() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind": "connectivity-sweep", "n_list": [100], "q_list": [0.2]}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::ConnectivitySweep));
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("connectivity-sweep"));
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut cfg = default_config(ExperimentKind::CapacityScaling);
        cfg.q_list = vec![1.0];
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::Field { field: "q_list", .. })
        ));

        let mut cfg = default_config(ExperimentKind::CapacityScaling);
        cfg.n_list = vec![1];
        assert!(cfg.validate().is_err());

        let mut cfg = default_config(ExperimentKind::Redundancy);
        cfg.q_list = vec![0.0, 0.2];
        assert!(cfg.validate().is_err());

        let mut cfg = default_config(ExperimentKind::ConnectivitySweep);
        cfg.radius = RadiusSpec::Explicit(vec![]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn directional_antenna_requires_beamwidth() {
        let mut cfg = default_config(ExperimentKind::CapacityScaling);
        cfg.mac.antenna = "directional".into();
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::Field {
                field: "mac.beamwidth",
                ..
            })
        ));
        cfg.mac.beamwidth = Some(std::f64::consts::PI / 3.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn defaults_validate_for_every_kind() {
        for kind in [
            ExperimentKind::ConnectivitySweep,
            ExperimentKind::ChannelConnectivity,
            ExperimentKind::CapacityScaling,
            ExperimentKind::DelayScaling,
            ExperimentKind::Tradeoff,
            ExperimentKind::Redundancy,
            ExperimentKind::Occupancy,
        ] {
            default_config(kind).validate().unwrap();
        }
    }

    #[test]
    fn radius_resolution() {
        let auto = RadiusSpec::Auto(vec![1.0, 2.0]);
        let radii = auto.resolve(1000, 0.0).unwrap();
        let base = adhocsim::topology::critical_radius_closed_form(1000, 0.0, 0.0).unwrap();
        assert_eq!(radii, vec![base, 2.0 * base]);

        let explicit = RadiusSpec::Explicit(vec![0.1]);
        assert_eq!(explicit.resolve(1000, 0.0).unwrap(), vec![0.1]);
    }
}
