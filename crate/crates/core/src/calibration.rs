//! Per-language thresholds (95th percentile, floored by the global minimums)
//! and score-to-class boundaries (per-class medians of a labeled sample).

use thiserror::Error;

use crate::model::{ClassBoundaries, Feature, QualityClass, ThresholdSet, TransformedFeatures};

/// Percentile used as the per-language saturation point.
pub const THRESHOLD_PERCENTILE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("empty dataset")]
    EmptyInput,
    #[error("percentile {0} is outside [0, 1]")]
    InvalidPercentile(f64),
    #[error("threshold must be positive and finite, got {0}")]
    NonPositiveThreshold(f64),
    #[error("invalid value {0}")]
    InvalidValue(f64),
    #[error("no labeled samples for class {0}")]
    MissingClass(QualityClass),
    #[error("median for {upper} ({upper_value}) is not above median for {lower} ({lower_value})")]
    NonMonotone {
        lower: QualityClass,
        upper: QualityClass,
        lower_value: f64,
        upper_value: f64,
    },
}

/// Linear-interpolation percentile: with sorted values `v` and `h = p·(n−1)`,
/// returns `v[⌊h⌋] + (h − ⌊h⌋)·(v[⌊h⌋+1] − v[⌊h⌋])`.
///
/// Uses selection rather than a full sort, so it runs in linear time and
/// reorders `values` in place.
pub fn percentile_in_place(values: &mut [f64], p: f64) -> Result<f64, CalibrationError> {
    if values.is_empty() {
        return Err(CalibrationError::EmptyInput);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CalibrationError::InvalidPercentile(p));
    }
    if let Some(&bad) = values.iter().find(|v| v.is_nan()) {
        return Err(CalibrationError::InvalidValue(bad));
    }
    let h = p * (values.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let (_, &mut low, upper) = values.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || upper.is_empty() {
        return Ok(low);
    }
    let high = upper
        .iter()
        .copied()
        .min_by(f64::total_cmp)
        .expect("non-empty");
    Ok(low + frac * (high - low))
}

pub fn percentile(values: &[f64], p: f64) -> Result<f64, CalibrationError> {
    percentile_in_place(&mut values.to_vec(), p)
}

/// Median; an even-sized sample gives the mean of the two middle values.
pub fn median(values: &[f64]) -> Result<f64, CalibrationError> {
    if values.is_empty() {
        return Err(CalibrationError::EmptyInput);
    }
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (lower, &mut m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if values.len() % 2 == 1 {
        return Ok(m);
    }
    let below = lower
        .iter()
        .copied()
        .max_by(f64::total_cmp)
        .expect("even len >= 2");
    Ok((below + m) / 2.0)
}

/// Collects per-feature columns. Shards may be filled independently and
/// merged; the result does not depend on merge order.
#[derive(Debug, Clone, Default)]
pub struct ThresholdAccumulator {
    columns: [Vec<f64>; 6],
}

impl ThresholdAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, tf: &TransformedFeatures) {
        for f in Feature::ALL {
            self.columns[f.index()].push(tf.get(f));
        }
    }

    pub fn merge(&mut self, other: ThresholdAccumulator) {
        for (mine, theirs) in self.columns.iter_mut().zip(other.columns) {
            mine.extend(theirs);
        }
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-feature 95th percentiles, each raised to its minimum.
    pub fn finish(mut self, minimums: &ThresholdSet) -> Result<ThresholdSet, CalibrationError> {
        if self.is_empty() {
            return Err(CalibrationError::EmptyInput);
        }
        let mut values = [0.0; 6];
        for f in Feature::ALL {
            let p95 = percentile_in_place(&mut self.columns[f.index()], THRESHOLD_PERCENTILE)?;
            values[f.index()] = p95.max(minimums.get(f));
        }
        ThresholdSet::new(values)
    }
}

pub fn compute_thresholds<'a, I>(
    dataset: I,
    minimums: &ThresholdSet,
) -> Result<ThresholdSet, CalibrationError>
where
    I: IntoIterator<Item = &'a TransformedFeatures>,
{
    let mut acc = ThresholdAccumulator::new();
    for tf in dataset {
        acc.push(tf);
    }
    acc.finish(minimums)
}

/// Upper limit of each class = median score of the samples labeled with it;
/// FA is pinned to 1.0.
pub fn derive_class_boundaries(
    labeled: &[(f64, QualityClass)],
) -> Result<ClassBoundaries, CalibrationError> {
    let mut by_class: [Vec<f64>; 6] = Default::default();
    for &(s, class) in labeled {
        if !s.is_finite() {
            return Err(CalibrationError::InvalidValue(s));
        }
        by_class[class.index()].push(s);
    }
    let mut medians = [0.0; 6];
    for class in QualityClass::ALL {
        let scores = &by_class[class.index()];
        if scores.is_empty() {
            return Err(CalibrationError::MissingClass(class));
        }
        medians[class.index()] = median(scores)?;
    }
    for pair in QualityClass::ALL.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if medians[lo.index()] >= medians[hi.index()] {
            return Err(CalibrationError::NonMonotone {
                lower: lo,
                upper: hi,
                lower_value: medians[lo.index()],
                upper_value: medians[hi.index()],
            });
        }
    }
    let mut limits = medians;
    limits[QualityClass::Fa.index()] = 1.0;
    ClassBoundaries::new(limits)
}
