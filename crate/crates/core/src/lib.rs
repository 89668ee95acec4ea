//! Language-agnostic quality modeling for Wikipedia articles.
//!
//! Six structural features are counted in the wikitext of each revision
//! ([`wikitext`]), moved into model space and compared against per-language
//! thresholds to give a score in `[0, 1]` ([`model`]). Thresholds and class
//! boundaries come from [`calibration`], agreement with editor labels from
//! [`evaluation`], and [`dump`] turns MediaWiki XML dumps into CSV datasets.

pub mod calibration;
pub mod config;
pub mod dump;
pub mod evaluation;
pub mod locale;
pub mod model;
pub mod wikitext;

pub use calibration::{compute_thresholds, derive_class_boundaries, percentile, CalibrationError};
pub use config::{ConfigError, ModelConfig};
pub use evaluation::{evaluate, EvalError, EvalReport};
pub use locale::{LocaleConfig, LocaleRegistry};
pub use model::{
    feature_score, score, transform, ClassBoundaries, Feature, QualityClass, ThresholdSet,
    TransformedFeatures, WeightSet,
};
pub use wikitext::{extract_features, RawFeatures};
