//! Simulation configuration: defaults, validation, and loading from JSON or
//! flat `key = value` text.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::beams::{InterceptRule, PilotMode};
use crate::channel::{LinkBudget, NoiseModel, PowerPolicy};
use crate::geometry::ScenarioGeometry;
use crate::phy::bch::{MESSAGE_LENGTH, WORD_LENGTH};
use crate::receiver::{detection_threshold, FootprintMode, Scheme, ThresholdMode};
use crate::scalar::Real;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Floating point type used for slot synthesis and reception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    F64,
    /// Agrees with `F64` on paired slots to within a message in thousands,
    /// at roughly 1.5× the throughput.
    #[default]
    F32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub carrier_frequency: f64,
    /// Overrides the wavelength derived from the carrier when set.
    pub wavelength: Option<f64>,
    pub elaa_length: f64,
    pub elaa_height: f64,
    pub n_t: usize,
    pub segment_min: f64,
    pub segment_max: f64,
    pub pt: f64,
    pub bandwidth: f64,
    pub temperature: f64,
    pub noise_figure_db: f64,
    pub implementation_loss_db: f64,
    pub n_p: usize,
    pub n_d: usize,
    pub message_bits: usize,
    pub pilot_count: usize,
    pub k: usize,
    pub r: usize,
    pub sic: bool,
    pub scheme: Scheme,
    pub threshold_mode: ThresholdMode,
    pub threshold_scale: f64,
    pub power_policy: PowerPolicy,
    pub footprint: FootprintMode,
    pub pilot_mode: PilotMode,
    pub intercept_rule: InterceptRule,
    pub max_rounds: usize,
    /// Multiplies the noise standard deviation in synthesis only.
    pub noise_scale: f64,
    pub precision: Precision,
    /// Reuse one slot realization per (K, R) across schemes and SIC settings.
    pub paired: bool,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            carrier_frequency: 60e9,
            wavelength: Some(0.005),
            elaa_length: 20.0,
            elaa_height: 8.0,
            n_t: 20,
            segment_min: -3.0,
            segment_max: 3.0,
            pt: 1e-4,
            bandwidth: 1e5,
            temperature: 290.0,
            noise_figure_db: 10.0,
            implementation_loss_db: 10.0,
            n_p: 8,
            n_d: 256,
            message_bits: MESSAGE_LENGTH,
            pilot_count: 8,
            k: 25,
            r: 4,
            sic: true,
            scheme: Scheme::Csra,
            threshold_mode: ThresholdMode::NoiseFloor,
            threshold_scale: 2.0,
            power_policy: PowerPolicy::Split,
            footprint: FootprintMode::Geometric,
            pilot_mode: PilotMode::PerReplica,
            intercept_rule: InterceptRule::Boresight,
            max_rounds: 100,
            noise_scale: 1.0,
            precision: Precision::F32,
            paired: true,
            trials: 10_000,
            seed: 1,
            workers: 0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

impl SimConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn from_key_value_str(text: &str) -> Result<Self, ConfigError> {
        let mut map = Map::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            map.insert(key.trim().to_string(), scalar_value(value.trim()));
        }
        let c: Self = serde_json::from_value(Value::Object(map))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads JSON when the file starts with `{`, key/value text otherwise.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if text.trim_start().starts_with('{') {
            Self::from_json_str(&text)
        } else {
            Self::from_key_value_str(&text)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("carrier_frequency", self.carrier_frequency)?;
        if let Some(w) = self.wavelength {
            positive("wavelength", w)?;
        }
        positive("elaa_length", self.elaa_length)?;
        positive("elaa_height", self.elaa_height)?;
        positive("pt", self.pt)?;
        positive("bandwidth", self.bandwidth)?;
        positive("temperature", self.temperature)?;
        positive("threshold_scale", self.threshold_scale)?;
        if self.implementation_loss_db < 0.0 {
            return Err(ConfigError::Invalid("implementation_loss_db must be ≥ 0".into()));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(ConfigError::Invalid("noise_scale must be ≥ 0".into()));
        }
        if !(self.segment_min <= self.segment_max) {
            return Err(ConfigError::Invalid("segment_min must not exceed segment_max".into()));
        }
        if self.n_t < 2 {
            return Err(ConfigError::Invalid("n_t must be at least 2".into()));
        }
        if self.n_d != WORD_LENGTH / 2 {
            return Err(ConfigError::Invalid(format!(
                "n_d must be {} (one QPSK-mapped BCH(511,421) codeword plus a null bit)",
                WORD_LENGTH / 2
            )));
        }
        if self.message_bits != MESSAGE_LENGTH {
            return Err(ConfigError::Invalid(format!("message_bits must be {MESSAGE_LENGTH}")));
        }
        if self.pilot_count == 0 || self.pilot_count > self.n_p || !self.n_p.is_power_of_two() {
            return Err(ConfigError::Invalid(format!(
                "need 1 ≤ pilot_count ≤ n_p with n_p a power of two (got {} and {})",
                self.pilot_count, self.n_p
            )));
        }
        if self.r == 0 {
            return Err(ConfigError::Invalid("r must be at least 1".into()));
        }
        if self.max_rounds == 0 {
            return Err(ConfigError::Invalid("max_rounds must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        self.geometry::<f64>()?;
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
            .unwrap_or(SPEED_OF_LIGHT / self.carrier_frequency)
    }

    pub fn geometry<T: Real>(&self) -> Result<ScenarioGeometry<T>, ConfigError> {
        ScenarioGeometry::with_half_wavelength_arrays(
            T::from_f64(self.wavelength()),
            T::from_f64(self.elaa_length),
            T::from_f64(self.elaa_height),
            self.n_t,
            (T::from_f64(self.segment_min), T::from_f64(self.segment_max)),
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            bandwidth: self.bandwidth,
            temperature: self.temperature,
            noise_figure_db: self.noise_figure_db,
            implementation_loss_db: self.implementation_loss_db,
        }
    }

    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget {
            noise_scale: self.noise_scale,
            ..LinkBudget::new(self.pt, self.noise_model(), self.power_policy)
        }
    }

    /// Detection threshold from the nominal noise level.
    pub fn threshold(&self) -> f64 {
        detection_threshold(
            self.threshold_mode,
            self.threshold_scale,
            self.noise_model().variance(),
            self.pt,
            self.n_p,
        )
    }
}

fn scalar_value(v: &str) -> Value {
    let unquoted = v.trim_matches('"');
    if unquoted.len() != v.len() {
        return Value::String(unquoted.to_string());
    }
    if let Ok(i) = v.parse::<u64>() {
        return Value::Number(i.into());
    }
    if let Ok(i) = v.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Some(n) = v.parse::<f64>().ok().and_then(Number::from_f64) {
        return Value::Number(n);
    }
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        "null" => Value::Null,
        _ => Value::String(v.to_string()),
    }
}
