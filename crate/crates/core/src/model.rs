//! From raw counts to a quality score and a quality class.
//!
//! Raw counts are first moved into model space ([`transform`]). Each transformed
//! feature is then compared against its per-language threshold and capped at 1
//! ([`feature_score`]), and the capped values are combined with the universal
//! weights ([`score`]).

use std::fmt;
use std::str::FromStr;

use crate::calibration::CalibrationError;
use crate::wikitext::RawFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    PageLength,
    References,
    Sections,
    Wikilinks,
    Categories,
    Media,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::PageLength,
        Feature::References,
        Feature::Sections,
        Feature::Wikilinks,
        Feature::Categories,
        Feature::Media,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Key used in config files.
    pub fn key(self) -> &'static str {
        match self {
            Feature::PageLength => "page_length",
            Feature::References => "references",
            Feature::Sections => "sections",
            Feature::Wikilinks => "wikilinks",
            Feature::Categories => "categories",
            Feature::Media => "media",
        }
    }

    pub fn from_key(key: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.key() == key)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Feature values in model space.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TransformedFeatures {
    /// sqrt(characters)
    pub page_length_t: f64,
    /// refs / sqrt(characters)
    pub refs_t: f64,
    /// headings / sqrt(characters)
    pub sections_t: f64,
    /// sqrt(wikilinks) / sqrt(characters)
    pub wikilinks_t: f64,
    pub categories_t: f64,
    pub media_t: f64,
}

impl TransformedFeatures {
    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::PageLength => self.page_length_t,
            Feature::References => self.refs_t,
            Feature::Sections => self.sections_t,
            Feature::Wikilinks => self.wikilinks_t,
            Feature::Categories => self.categories_t,
            Feature::Media => self.media_t,
        }
    }

    pub fn values(&self) -> [f64; 6] {
        Feature::ALL.map(|f| self.get(f))
    }
}

/// Moves raw counts into model space. Ratio features are 0 for an empty page.
pub fn transform(raw: &RawFeatures) -> TransformedFeatures {
    let norm_length = (raw.num_chars as f64).sqrt();
    let per_length = |x: f64| {
        if raw.num_chars == 0 {
            0.0
        } else {
            x / norm_length
        }
    };
    TransformedFeatures {
        page_length_t: norm_length,
        refs_t: per_length(raw.num_refs as f64),
        sections_t: per_length(raw.num_headings as f64),
        wikilinks_t: per_length((raw.num_wikilinks as f64).sqrt()),
        categories_t: raw.num_categories as f64,
        media_t: raw.num_media as f64,
    }
}

/// Fraction of the threshold reached by `value`, capped at 1.
pub fn feature_score(value: f64, threshold: f64) -> Result<f64, CalibrationError> {
    if threshold.is_nan() || threshold <= 0.0 || threshold.is_infinite() {
        return Err(CalibrationError::NonPositiveThreshold(threshold));
    }
    if value.is_nan() || value < 0.0 {
        return Err(CalibrationError::InvalidValue(value));
    }
    Ok((value / threshold).min(1.0))
}

/// Universal feature weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSet([f64; 6]);

impl Default for WeightSet {
    /// Published weights. They sum to 0.998, not 1.
    fn default() -> Self {
        let mut w = [0.0; 6];
        w[Feature::PageLength.index()] = 0.395;
        w[Feature::References.index()] = 0.181;
        w[Feature::Sections.index()] = 0.123;
        w[Feature::Wikilinks.index()] = 0.115;
        w[Feature::Media.index()] = 0.114;
        w[Feature::Categories.index()] = 0.070;
        WeightSet(w)
    }
}

impl WeightSet {
    /// Values are indexed by [`Feature::index`].
    pub fn new(values: [f64; 6]) -> Result<Self, CalibrationError> {
        if let Some(&bad) = values.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(CalibrationError::InvalidValue(bad));
        }
        if values.iter().sum::<f64>() <= 0.0 {
            return Err(CalibrationError::InvalidValue(0.0));
        }
        Ok(WeightSet(values))
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.0[feature.index()]
    }

    pub fn values(&self) -> [f64; 6] {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Same proportions, rescaled to sum to 1.
    pub fn normalized(&self) -> WeightSet {
        let total = self.sum();
        WeightSet(self.0.map(|w| w / total))
    }
}

/// Saturation point of each feature, in model space. All entries are > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet([f64; 6]);

/// Global page-length minimum in characters; thresholds hold its square root.
pub const MIN_PAGE_LENGTH_CHARS: f64 = 10_000.0;

impl ThresholdSet {
    pub fn new(values: [f64; 6]) -> Result<Self, CalibrationError> {
        if let Some(&bad) = values.iter().find(|t| !t.is_finite() || **t <= 0.0) {
            return Err(CalibrationError::NonPositiveThreshold(bad));
        }
        Ok(ThresholdSet(values))
    }

    /// The floors no language may go below: 10,000 characters, 0.15 refs,
    /// 0.1 sections, 0.1 wikilinks, 5 categories, 2 media files.
    pub fn global_minimums() -> Self {
        let mut t = [0.0; 6];
        t[Feature::PageLength.index()] = MIN_PAGE_LENGTH_CHARS.sqrt();
        t[Feature::References.index()] = 0.15;
        t[Feature::Sections.index()] = 0.1;
        t[Feature::Wikilinks.index()] = 0.1;
        t[Feature::Media.index()] = 2.0;
        t[Feature::Categories.index()] = 5.0;
        ThresholdSet(t)
    }

    /// Component-wise max of `self` and `floor`.
    pub fn floored(&self, floor: &ThresholdSet) -> ThresholdSet {
        ThresholdSet(std::array::from_fn(|i| self.0[i].max(floor.0[i])))
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.0[feature.index()]
    }

    pub fn values(&self) -> [f64; 6] {
        self.0
    }
}

impl Default for ThresholdSet {
    fn default() -> Self {
        Self::global_minimums()
    }
}

/// Weighted sum of the capped feature scores; lies in `[0, weights.sum()]`.
pub fn score(tf: &TransformedFeatures, thresholds: &ThresholdSet, weights: &WeightSet) -> f64 {
    Feature::ALL
        .into_iter()
        .map(|f| {
            let capped = feature_score(tf.get(f), thresholds.get(f))
                .expect("ThresholdSet holds positive thresholds and features are non-negative");
            weights.get(f) * capped
        })
        .sum()
}

/// Convenience: transform and score a raw revision.
pub fn score_raw(raw: &RawFeatures, thresholds: &ThresholdSet, weights: &WeightSet) -> f64 {
    score(&transform(raw), thresholds, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QualityClass {
    Stub,
    Start,
    C,
    B,
    Ga,
    Fa,
}

impl QualityClass {
    /// Lowest to highest.
    pub const ALL: [QualityClass; 6] = [
        QualityClass::Stub,
        QualityClass::Start,
        QualityClass::C,
        QualityClass::B,
        QualityClass::Ga,
        QualityClass::Fa,
    ];

    /// 1 for STUB up to 6 for FA.
    pub fn rank(self) -> u8 {
        self as u8 + 1
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_rank(rank: u8) -> Option<QualityClass> {
        QualityClass::ALL
            .get((rank as usize).checked_sub(1)?)
            .copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            QualityClass::Stub => "STUB",
            QualityClass::Start => "START",
            QualityClass::C => "C",
            QualityClass::B => "B",
            QualityClass::Ga => "GA",
            QualityClass::Fa => "FA",
        }
    }
}

impl fmt::Display for QualityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownClass(pub String);

impl fmt::Display for UnknownClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown quality class `{}`", self.0)
    }
}

impl std::error::Error for UnknownClass {}

impl FromStr for QualityClass {
    type Err = UnknownClass;

    /// English class labels, case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        QualityClass::ALL
            .into_iter()
            .find(|c| c.label() == upper)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

/// Upper score limit of each class, strictly increasing, with FA capped at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassBoundaries([f64; 6]);

impl ClassBoundaries {
    /// `limits` are indexed by [`QualityClass::index`]; the FA entry must be 1.0.
    pub fn new(limits: [f64; 6]) -> Result<Self, CalibrationError> {
        if let Some(&bad) = limits.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(CalibrationError::InvalidValue(bad));
        }
        for pair in QualityClass::ALL.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if limits[lo.index()] >= limits[hi.index()] {
                return Err(CalibrationError::NonMonotone {
                    lower: lo,
                    upper: hi,
                    lower_value: limits[lo.index()],
                    upper_value: limits[hi.index()],
                });
            }
        }
        if limits[QualityClass::Fa.index()] != 1.0 {
            return Err(CalibrationError::InvalidValue(
                limits[QualityClass::Fa.index()],
            ));
        }
        Ok(ClassBoundaries(limits))
    }

    pub fn upper_limit(&self, class: QualityClass) -> f64 {
        self.0[class.index()]
    }

    pub fn limits(&self) -> [f64; 6] {
        self.0
    }

    /// Lowest class whose upper limit is at least `s`. Anything above the GA
    /// limit, including values past 1, is FA.
    pub fn classify(&self, s: f64) -> QualityClass {
        QualityClass::ALL
            .into_iter()
            .find(|c| s <= self.upper_limit(*c))
            .unwrap_or(QualityClass::Fa)
    }
}
