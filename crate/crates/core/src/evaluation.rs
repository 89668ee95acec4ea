//! Agreement between predicted quality and editor-assigned labels.
//!
//! Four numbers are reported: the Spearman correlation between scores and
//! label ranks (m1), and the share of predictions that match exactly (m2),
//! fall in the same coarse group (m3) or land within one class (m4).

use std::fmt::{self, Write as _};

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::model::QualityClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("correlation undefined: {0} is constant")]
    Constant(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("unknown French quality label `{0}`")]
    UnknownLabel(String),
}

/// French classes in the order of the English classes they map to (STUB first).
const FRENCH_LABELS: [&str; 6] = ["ébauche", "BD", "B", "A", "BA", "AdQ"];

/// Lowercased with accents removed, so `Ébauche`, `ébauche` and `ebauche` agree.
fn fold_label(label: &str) -> String {
    label
        .trim()
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Maps a French quality label to its English equivalent:
/// AdQ→FA, BA→GA, A→B, B→C, BD→START, ébauche→STUB.
pub fn map_label(label: &str) -> Result<QualityClass, EvalError> {
    let folded = fold_label(label);
    FRENCH_LABELS
        .iter()
        .position(|fr| fold_label(fr) == folded)
        .map(|i| QualityClass::ALL[i])
        .ok_or_else(|| EvalError::UnknownLabel(label.to_string()))
}

/// Inverse of [`map_label`].
pub fn french_label(class: QualityClass) -> &'static str {
    FRENCH_LABELS[class.index()]
}

/// rank / 6: FA = 1.0, GA = 5/6, ..., STUB = 1/6.
pub fn label_to_rank(class: QualityClass) -> f64 {
    f64::from(class.rank()) / 6.0
}

/// Ranks starting at 1, ties sharing the mean of the positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(EvalError::Constant("first argument"));
    }
    if syy == 0.0 {
        return Err(EvalError::Constant("second argument"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of the average-tie rank vectors.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(EvalError::TooFew {
            needed: 2,
            got: xs.len(),
        });
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("first argument"));
    }
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("second argument"));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Coarse groups: STUB/START, C/B, GA/FA.
pub fn group(class: QualityClass) -> u8 {
    (class.rank() - 1) / 2
}

/// Raw counts behind m2–m4. Counts from disjoint samples add.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlignmentCounts {
    pub n: u64,
    pub exact: u64,
    pub same_group: u64,
    pub within_one: u64,
}

impl AlignmentCounts {
    pub fn record(&mut self, pred: QualityClass, truth: QualityClass) {
        self.n += 1;
        self.exact += u64::from(pred == truth);
        self.same_group += u64::from(group(pred) == group(truth));
        self.within_one += u64::from(pred.rank().abs_diff(truth.rank()) <= 1);
    }

    pub fn merge(&mut self, other: &AlignmentCounts) {
        self.n += other.n;
        self.exact += other.exact;
        self.same_group += other.same_group;
        self.within_one += other.within_one;
    }

    /// (m2, m3, m4) as percentages.
    pub fn rates(&self) -> Result<(f64, f64, f64), EvalError> {
        if self.n == 0 {
            return Err(EvalError::TooFew { needed: 1, got: 0 });
        }
        let pct = |k: u64| k as f64 * 100.0 / self.n as f64;
        Ok((pct(self.exact), pct(self.same_group), pct(self.within_one)))
    }
}

fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::LengthMismatch { left, right });
    }
    Ok(())
}

/// (m2, m3, m4): exact match, same group, within one class, in percent.
pub fn alignment_metrics(
    preds: &[QualityClass],
    truths: &[QualityClass],
) -> Result<(f64, f64, f64), EvalError> {
    check_lengths(preds.len(), truths.len())?;
    let mut counts = AlignmentCounts::default();
    for (&p, &t) in preds.iter().zip(truths) {
        counts.record(p, t);
    }
    counts.rates()
}

/// 6×6 counts; rows are the true class, columns the predicted class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix([[u64; 6]; 6]);

impl ConfusionMatrix {
    pub fn get(&self, truth: QualityClass, pred: QualityClass) -> u64 {
        self.0[truth.index()][pred.index()]
    }

    pub fn record(&mut self, truth: QualityClass, pred: QualityClass) {
        self.0[truth.index()][pred.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..6).map(|i| self.0[i][i]).sum()
    }

    pub fn rows(&self) -> &[[u64; 6]; 6] {
        &self.0
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.0.iter_mut().zip(&other.0) {
            for (cell, v) in row.iter_mut().zip(other_row) {
                *cell += v;
            }
        }
    }
}

pub fn confusion_matrix(
    preds: &[QualityClass],
    truths: &[QualityClass],
) -> Result<ConfusionMatrix, EvalError> {
    check_lengths(preds.len(), truths.len())?;
    let mut m = ConfusionMatrix::default();
    for (&p, &t) in preds.iter().zip(truths) {
        m.record(t, p);
    }
    Ok(m)
}

/// What m1 correlates against the truth ranks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum M1Basis {
    /// The continuous predicted scores.
    #[default]
    Scores,
    /// The ranks of the predicted classes.
    PredictedClasses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: u64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub confusion: ConfusionMatrix,
}

pub fn evaluate(
    scores: &[f64],
    preds: &[QualityClass],
    truths: &[QualityClass],
) -> Result<EvalReport, EvalError> {
    evaluate_with(scores, preds, truths, M1Basis::Scores)
}

pub fn evaluate_with(
    scores: &[f64],
    preds: &[QualityClass],
    truths: &[QualityClass],
    basis: M1Basis,
) -> Result<EvalReport, EvalError> {
    check_lengths(scores.len(), truths.len())?;
    check_lengths(preds.len(), truths.len())?;
    let truth_ranks: Vec<f64> = truths.iter().map(|&c| label_to_rank(c)).collect();
    let m1 = match basis {
        M1Basis::Scores => spearman(scores, &truth_ranks)?,
        M1Basis::PredictedClasses => {
            let pred_ranks: Vec<f64> = preds.iter().map(|&c| label_to_rank(c)).collect();
            spearman(&pred_ranks, &truth_ranks)?
        }
    };
    let (m2, m3, m4) = alignment_metrics(preds, truths)?;
    Ok(EvalReport {
        n: truths.len() as u64,
        m1,
        m2,
        m3,
        m4,
        confusion: confusion_matrix(preds, truths)?,
    })
}

impl EvalReport {
    /// Flat `key=value` lines: n, m1..m4, then one `confusion.<TRUTH>.<PRED>` per cell.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n={}", self.n).unwrap();
        for (key, v) in [
            ("m1", self.m1),
            ("m2", self.m2),
            ("m3", self.m3),
            ("m4", self.m4),
        ] {
            writeln!(out, "{key}={v:.6}").unwrap();
        }
        for t in QualityClass::ALL {
            for p in QualityClass::ALL {
                writeln!(out, "confusion.{t}.{p}={}", self.confusion.get(t, p)).unwrap();
            }
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples: {}", self.n)?;
        writeln!(f, "m1 spearman rank correlation: {:.4}", self.m1)?;
        writeln!(f, "m2 exact match:               {:.2}%", self.m2)?;
        writeln!(f, "m3 same group:                {:.2}%", self.m3)?;
        writeln!(f, "m4 within one class:          {:.2}%", self.m4)?;
        writeln!(f)?;
        write!(f, "{:>8}", "truth\\pred")?;
        for p in QualityClass::ALL {
            write!(f, "{:>7}", p.label())?;
        }
        writeln!(f)?;
        for t in QualityClass::ALL {
            write!(f, "{:>10}", t.label())?;
            for p in QualityClass::ALL {
                write!(f, "{:>7}", self.confusion.get(t, p))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
