//! Defaults read from the config directory. Command-line flags override them.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use wikiqual_core::{LocaleRegistry, ModelConfig};

pub const LOCALES_FILE: &str = "locales.ini";
pub const MODEL_FILE: &str = "model.ini";

#[derive(Debug, Default)]
pub struct Settings {
    pub locales: LocaleRegistry,
    pub model: ModelConfig,
}

impl Settings {
    /// Bundled locales plus whatever `dir` provides. Missing files are skipped.
    pub fn load(dir: Option<&Path>) -> Result<Self> {
        let mut settings = Settings::default();
        let Some(dir) = dir else {
            return Ok(settings);
        };
        let locales = dir.join(LOCALES_FILE);
        if locales.is_file() {
            settings
                .locales
                .merge_file(&locales)
                .with_context(|| format!("in {}", locales.display()))?;
        }
        let model = dir.join(MODEL_FILE);
        if model.is_file() {
            settings.model = load_model(&model)?;
        }
        Ok(settings)
    }
}

pub fn load_model(path: &Path) -> Result<ModelConfig> {
    ModelConfig::from_path(path).with_context(|| format!("in {}", path.display()))
}

/// Reads one section from an explicitly named model file, falling back to the
/// config directory's value.
pub fn pick<T>(
    flag: Option<&PathBuf>,
    section: &str,
    get: impl Fn(ModelConfig) -> Option<T>,
    fallback: Option<T>,
) -> Result<Option<T>> {
    match flag {
        Some(path) => get(load_model(path)?)
            .map(Some)
            .with_context(|| format!("{} has no [{section}] section", path.display())),
        None => Ok(fallback),
    }
}
