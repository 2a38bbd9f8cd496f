//! Run configuration shared by the CLI and the figure presets.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{linspace, Band, FrequencyGrid, ScanConfig};
use crate::error::{Error, Result};
use crate::scattering::{InputKind, SystemParams};
use crate::selfenergy::{QuadConfig, TruncationPolicy};
use crate::waveguide::WaveguideGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Modes,
    Spectrum,
    PhaseMap,
    Dressed,
    Validate,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modes" => Ok(Self::Modes),
            "spectrum" => Ok(Self::Spectrum),
            "phase-map" => Ok(Self::PhaseMap),
            "dressed" => Ok(Self::Dressed),
            "validate" => Ok(Self::Validate),
            other => Err(Error::InvalidInput(format!("unknown command {other:?}"))),
        }
    }
}

/// Emitter frequency: a number or the midpoint of the selected band.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum OmegaE {
    #[default]
    Mid,
    Value(f64),
}

impl fmt::Display for OmegaE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mid => f.write_str("mid"),
            Self::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for OmegaE {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "mid" || s == "band-midpoint" {
            return Ok(Self::Mid);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Self::Value)
            .ok_or_else(|| Error::InvalidInput(format!("omega_e must be a number or \"mid\", got {s:?}")))
    }
}

impl Serialize for OmegaE {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Mid => serializer.serialize_str("mid"),
            Self::Value(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for OmegaE {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Self::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Band as a channel count or an explicit `[lo, hi]` interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandSelector {
    Index(usize),
    Interval([f64; 2]),
}

impl Default for BandSelector {
    fn default() -> Self {
        Self::Index(1)
    }
}

impl BandSelector {
    pub fn resolve(&self, geom: &WaveguideGeometry) -> Result<Band> {
        match *self {
            Self::Index(j) => Band::of(j, geom),
            Self::Interval([lo, hi]) => Band::explicit(lo, hi, geom),
        }
    }
}

impl FromStr for BandSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((lo, hi)) = s.split_once(':').or_else(|| s.split_once(',')) {
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad band interval {s:?}")))
            };
            return Ok(Self::Interval([parse(lo)?, parse(hi)?]));
        }
        s.trim()
            .parse::<usize>()
            .map(Self::Index)
            .map_err(|_| Error::InvalidInput(format!("band must be an index or lo:hi, got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidInput(format!("format must be csv or json, got {other:?}"))),
        }
    }
}

fn default_a() -> f64 {
    1.5
}
fn default_g() -> f64 {
    0.1
}
fn default_points() -> usize {
    1001
}
fn default_axis_points() -> usize {
    50
}
fn default_rabi_range() -> [f64; 2] {
    [0.0, 2.0]
}
fn default_detuning_range() -> [f64; 2] {
    [-2.0, 2.0]
}
fn default_modes_max() -> f64 {
    11.0
}
fn default_seed() -> u64 {
    20240607
}
fn default_samples() -> usize {
    200
}

/// Everything a run needs. Unset fields take their defaults when parsed, and
/// serialisation always writes every field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default)]
    pub z0: f64,
    #[serde(default)]
    pub omega_e: OmegaE,
    #[serde(default)]
    pub rabi: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default)]
    pub band: BandSelector,
    #[serde(default)]
    pub input: InputKind,
    /// Frequency range; defaults to the band.
    #[serde(default)]
    pub omega_min: Option<f64>,
    #[serde(default)]
    pub omega_max: Option<f64>,
    #[serde(default = "default_points")]
    pub omega_points: usize,
    #[serde(default = "default_rabi_range")]
    pub rabi_range: [f64; 2],
    #[serde(default = "default_axis_points")]
    pub rabi_points: usize,
    #[serde(default = "default_detuning_range")]
    pub detuning_range: [f64; 2],
    #[serde(default = "default_axis_points")]
    pub detuning_points: usize,
    /// Upper frequency for `modes`.
    #[serde(default = "default_modes_max")]
    pub modes_max: f64,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    /// Seed for randomised checks in `validate`.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Samples per randomised check in `validate`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub preset: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            a: default_a(),
            z0: 0.0,
            omega_e: OmegaE::Mid,
            rabi: 0.0,
            detuning: 0.0,
            g: default_g(),
            band: BandSelector::default(),
            input: InputKind::Scss,
            omega_min: None,
            omega_max: None,
            omega_points: default_points(),
            rabi_range: default_rabi_range(),
            rabi_points: default_axis_points(),
            detuning_range: default_detuning_range(),
            detuning_points: default_axis_points(),
            modes_max: default_modes_max(),
            truncation: TruncationPolicy::default(),
            quad: QuadConfig::default(),
            scan: ScanConfig::default(),
            seed: default_seed(),
            samples: default_samples(),
            out: None,
            format: OutputFormat::Csv,
            threads: None,
            preset: None,
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn geometry(&self) -> Result<WaveguideGeometry> {
        WaveguideGeometry::new(self.a, self.z0)
    }

    pub fn resolve_band(&self) -> Result<Band> {
        self.band.resolve(&self.geometry()?)
    }

    /// Physical parameters with `omega_e` resolved against the band.
    pub fn system_params(&self) -> Result<SystemParams> {
        let geom = self.geometry()?;
        let omega_e = match self.omega_e {
            OmegaE::Value(v) => v,
            OmegaE::Mid => self.band.resolve(&geom)?.midpoint(),
        };
        let params = SystemParams {
            omega_e,
            rabi: self.rabi,
            detuning: self.detuning,
            g: self.g,
            geom,
            truncation: self.truncation,
            quad: self.quad,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn omega_grid(&self, params: &SystemParams) -> Result<FrequencyGrid> {
        let (lo, hi) = match (self.omega_min, self.omega_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            (lo, hi) => {
                let band = self.resolve_band()?;
                (lo.unwrap_or(band.lo), hi.unwrap_or(band.hi))
            }
        };
        FrequencyGrid::new(lo, hi, self.omega_points, params)
    }

    pub fn rabi_axis(&self) -> Result<Vec<f64>> {
        let [lo, hi] = self.rabi_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) || self.rabi_points == 0 {
            return Err(Error::InvalidParameter(format!(
                "rabi range [{lo}, {hi}] with {} points",
                self.rabi_points
            )));
        }
        Ok(linspace(lo, hi, self.rabi_points))
    }

    pub fn detuning_axis(&self) -> Result<Vec<f64>> {
        let [lo, hi] = self.detuning_range;
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) || self.detuning_points == 0 {
            return Err(Error::InvalidParameter(format!(
                "detuning range [{lo}, {hi}] with {} points",
                self.detuning_points
            )));
        }
        Ok(linspace(lo, hi, self.detuning_points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_fills_defaults() {
        let cfg = RunConfig::from_json(r#"{"command": "spectrum"}"#).unwrap();
        assert_eq!(cfg, RunConfig::new(Command::Spectrum));
    }

    #[test]
    fn omega_e_forms() {
        let cfg = RunConfig::from_json(r#"{"command": "dressed", "omega_e": 5.0}"#).unwrap();
        assert_eq!(cfg.omega_e, OmegaE::Value(5.0));
        let cfg = RunConfig::from_json(r#"{"command": "dressed", "omega_e": "mid", "band": 2}"#).unwrap();
        let params = cfg.system_params().unwrap();
        let pi = std::f64::consts::PI;
        assert!((params.omega_e - 0.5 * pi * (5f64.sqrt() + (85.0f64 / 9.0).sqrt())).abs() < 1e-12);
        assert!("fast".parse::<OmegaE>().is_err());
    }

    #[test]
    fn band_forms() {
        let cfg = RunConfig::from_json(r#"{"command": "spectrum", "band": [7.5, 9.0]}"#).unwrap();
        assert_eq!(cfg.resolve_band().unwrap().j_max, 2);
        assert_eq!("3".parse::<BandSelector>().unwrap(), BandSelector::Index(3));
        assert_eq!("4:5".parse::<BandSelector>().unwrap(), BandSelector::Interval([4.0, 5.0]));
    }

    #[test]
    fn rejects_unknown_fields_and_zero_custom() {
        assert!(RunConfig::from_json(r#"{"command": "spectrum", "colour": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command": "spectrum", "input": "custom:0,0"}"#).is_err());
        let cfg = RunConfig::from_json(r#"{"command": "spectrum", "input": "custom:3,4i"}"#).unwrap();
        match cfg.input {
            InputKind::Custom(c) => assert!((c[0].re - 0.6).abs() < 1e-15 && (c[1].im - 0.8).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
