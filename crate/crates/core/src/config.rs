//! Plain-text (INI style) config files for weights, minimums, thresholds and
//! class boundaries.
//!
//! ```text
//! [weights]
//! page_length = 0.395
//! references = 0.181
//! ...
//! [boundaries]
//! STUB = 0.21
//! ...
//! FA = 1
//! ```
//!
//! Every section that is present must list all of its keys. Numbers are written
//! in shortest round-trip form so that a file read back yields identical values.

use std::io;
use std::path::{Path, PathBuf};

use ini::Ini;
use thiserror::Error;

use crate::calibration::CalibrationError;
use crate::model::{ClassBoundaries, Feature, QualityClass, ThresholdSet, WeightSet};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config syntax error: {0}")]
    Parse(#[from] ini::ParseError),
    #[error("[{section}] is missing key `{key}`")]
    MissingKey { section: String, key: String },
    #[error("[{section}] {key}: invalid value `{value}`")]
    Invalid {
        section: String,
        key: String,
        value: String,
    },
    #[error("unknown language `{code}` (known: {known})")]
    UnknownLanguage { code: String, known: String },
    #[error("section [{section}]: {source}")]
    Calibration {
        section: String,
        #[source]
        source: CalibrationError,
    },
}

impl ConfigError {
    pub(crate) fn invalid(section: &str, key: &str, value: &str) -> Self {
        ConfigError::Invalid {
            section: section.to_string(),
            key: key.to_string(),
            value: value.to_string(),
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        ConfigError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub const WEIGHTS: &str = "weights";
pub const MINIMUMS: &str = "minimums";
pub const THRESHOLDS: &str = "thresholds";
pub const BOUNDARIES: &str = "boundaries";

/// Everything a model config file may carry. Absent sections stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelConfig {
    pub language: Option<String>,
    pub weights: Option<WeightSet>,
    pub minimums: Option<ThresholdSet>,
    pub thresholds: Option<ThresholdSet>,
    pub boundaries: Option<ClassBoundaries>,
}

impl ModelConfig {
    pub fn parse_ini(source: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(source)?;
        for (section, _) in ini.iter() {
            if let Some(name) = section {
                if ![WEIGHTS, MINIMUMS, THRESHOLDS, BOUNDARIES].contains(&name) {
                    return Err(ConfigError::invalid(name, "section", "unknown section"));
                }
            }
        }
        let language = ini.general_section().get("language").map(String::from);
        let weights = feature_section(&ini, WEIGHTS)?
            .map(|v| WeightSet::new(v).map_err(|e| calibration(WEIGHTS, e)))
            .transpose()?;
        let minimums = feature_section(&ini, MINIMUMS)?
            .map(|v| ThresholdSet::new(v).map_err(|e| calibration(MINIMUMS, e)))
            .transpose()?;
        let thresholds = feature_section(&ini, THRESHOLDS)?
            .map(|v| ThresholdSet::new(v).map_err(|e| calibration(THRESHOLDS, e)))
            .transpose()?;
        let boundaries = match ini.section(Some(BOUNDARIES)) {
            None => None,
            Some(props) => {
                let mut limits = [0.0; 6];
                for class in QualityClass::ALL {
                    limits[class.index()] =
                        number(props.get(class.label()), BOUNDARIES, class.label())?;
                }
                Some(ClassBoundaries::new(limits).map_err(|e| calibration(BOUNDARIES, e))?)
            }
        };
        Ok(ModelConfig {
            language,
            weights,
            minimums,
            thresholds,
            boundaries,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError::io(path, e))?;
        Self::parse_ini(&source)
    }

    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        if let Some(lang) = &self.language {
            ini.with_general_section().set("language", lang.as_str());
        }
        let mut put = |name: &str, values: [f64; 6]| {
            let mut section = ini.with_section(Some(name));
            for f in Feature::ALL {
                section.set(f.key(), values[f.index()].to_string());
            }
        };
        if let Some(w) = &self.weights {
            put(WEIGHTS, w.values());
        }
        if let Some(m) = &self.minimums {
            put(MINIMUMS, m.values());
        }
        if let Some(t) = &self.thresholds {
            put(THRESHOLDS, t.values());
        }
        if let Some(b) = &self.boundaries {
            let mut section = ini.with_section(Some(BOUNDARIES));
            for class in QualityClass::ALL {
                section.set(class.label(), b.upper_limit(class).to_string());
            }
        }
        let mut out = Vec::new();
        ini.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("ini output is UTF-8")
    }

    pub fn write_to_path(&self, path: &Path) -> Result<(), ConfigError> {
        std::fs::write(path, self.to_ini_string()).map_err(|e| ConfigError::io(path, e))
    }
}

fn calibration(section: &str, source: CalibrationError) -> ConfigError {
    ConfigError::Calibration {
        section: section.to_string(),
        source,
    }
}

fn number(raw: Option<&str>, section: &str, key: &str) -> Result<f64, ConfigError> {
    let raw = raw.ok_or_else(|| ConfigError::MissingKey {
        section: section.to_string(),
        key: key.to_string(),
    })?;
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::invalid(section, key, raw))
}

fn feature_section(ini: &Ini, name: &str) -> Result<Option<[f64; 6]>, ConfigError> {
    let Some(props) = ini.section(Some(name)) else {
        return Ok(None);
    };
    for (key, value) in props.iter() {
        if Feature::from_key(key).is_none() {
            return Err(ConfigError::invalid(name, key, value));
        }
    }
    let mut values = [0.0; 6];
    for f in Feature::ALL {
        values[f.index()] = number(props.get(f.key()), name, f.key())?;
    }
    Ok(Some(values))
}
