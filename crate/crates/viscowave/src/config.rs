//! Run configuration: a JSON config file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use viscowave_core::medium::{icosphere, unit};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl FrequencyGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min > 0.0
            && self.min < self.max
            && self.count >= 2;
        if ok {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "frequency grid needs 0 < min < max and count >= 2 (got min={}, max={}, count={})",
                self.min, self.max, self.count
            )))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let t = |i: usize| i as f64 / (n - 1) as f64;
        match self.scale {
            Scale::Linear => (0..n).map(|i| self.min + (self.max - self.min) * t(i)).collect(),
            Scale::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n).map(|i| (a + (b - a) * t(i)).exp()).collect()
            }
        }
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            min: 1e-2,
            max: 1e4,
            count: 13,
            scale: Scale::Log,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DirectionSpec {
    Icosphere(u32),
    List(Vec<[f64; 3]>),
}

impl DirectionSpec {
    /// Unit directions; explicit lists are normalized.
    pub fn directions(&self) -> Result<Vec<[f64; 3]>, CliError> {
        match self {
            DirectionSpec::Icosphere(level) if *level <= 5 => Ok(icosphere(*level)),
            DirectionSpec::Icosphere(level) => Err(CliError::Usage(format!(
                "icosphere level {level} is too large (at most 5)"
            ))),
            DirectionSpec::List(v) if v.is_empty() => {
                Err(CliError::Usage("direction list is empty".into()))
            }
            DirectionSpec::List(v) => v
                .iter()
                .map(|d| {
                    let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n.is_finite() && n > 0.0 {
                        Ok(unit(*d))
                    } else {
                        Err(CliError::Usage(format!("direction {d:?} cannot be normalized")))
                    }
                })
                .collect(),
        }
    }
}

/// Everything a sweep, flux or recovery run needs besides the medium.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub medium: PathBuf,
    pub frequencies: FrequencyGrid,
    pub directions: DirectionSpec,
    pub output: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub angles_deg: Vec<f64>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ANGLES: [f64; 5] = [0.0, 15.0, 30.0, 45.0, 60.0];

impl SweepConfig {
    pub fn new(medium: impl Into<PathBuf>) -> Self {
        SweepConfig {
            medium: medium.into(),
            frequencies: FrequencyGrid::default(),
            directions: DirectionSpec::Icosphere(0),
            output: None,
            tol: None,
            seed: DEFAULT_SEED,
            angles_deg: DEFAULT_ANGLES.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.frequencies.validate()?;
        self.directions.directions()?;
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Usage(format!("tolerance must be non-negative, got {t}")));
            }
        }
        if self
            .angles_deg
            .iter()
            .any(|a| !(a.is_finite() && (0.0..90.0).contains(a)))
        {
            return Err(CliError::Usage("angles must lie in [0, 90) degrees".into()));
        }
        Ok(())
    }
}

/// The JSON config file; every field is optional and flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub medium: Option<PathBuf>,
    pub frequencies: Option<FrequencyGrid>,
    pub icosphere_level: Option<u32>,
    pub directions: Option<Vec<[f64; 3]>>,
    pub output: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub angles: Option<Vec<f64>>,
}

impl ConfigFile {
    /// Reads a config; relative paths inside it are resolved against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
            origin: origin.clone(),
            message: e.to_string(),
        })?;
        let mut cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
            origin,
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.medium, &mut cfg.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Parses `a,b,c` into floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {:?}: {e}", t.trim()))
        })
        .collect()
}

/// Parses `x,y,z` into a vector.
pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_list(s)?;
    <[f64; 3]>::try_from(v).map_err(|_| format!("expected three components in {s:?}"))
}

/// Parses `x,y,z;x,y,z;...`.
pub fn parse_directions(s: &str) -> Result<Vec<[f64; 3]>, String> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_vec3).collect()
}
