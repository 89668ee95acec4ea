use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, NaiveDate, Utc};
use wikiqual_core::calibration::ThresholdAccumulator;
use wikiqual_core::dump::{
    extract_features_csv, read_features_csv, read_item_map, read_labeled_csv, ExtractOptions,
    ExtractSummary, LabeledRow, RevisionRecord, ScoreRecord, ScoresCsvWriter, TimeRange,
};
use wikiqual_core::evaluation::{evaluate_with, map_label, M1Basis};
use wikiqual_core::{
    derive_class_boundaries, transform, LocaleConfig, ModelConfig, QualityClass, ThresholdSet,
    TransformedFeatures, WeightSet,
};

use crate::args::{CalibrateArgs, EvaluateArgs, ExtractArgs, ScoreArgs};
use crate::io::{open_input, Output};
use crate::settings::{pick, Settings};

fn parse_time(flag: &str, value: &str) -> Result<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(value) {
        return Ok(t.with_timezone(&Utc));
    }
    if let Ok(d) = NaiveDate::parse_from_str(value, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).unwrap().and_utc());
    }
    bail!("--{flag}: expected RFC 3339 time or YYYY-MM-DD, got `{value}`")
}

fn resolve_locale(args: &ExtractArgs, settings: &mut Settings) -> Result<LocaleConfig> {
    if let Some(path) = &args.locales {
        settings.locales.merge_file(path)?;
    }
    let lang = match (&args.lang, &settings.model.language) {
        (Some(l), _) | (None, Some(l)) => l.clone(),
        (None, None) => bail!("no language given; pass --lang"),
    };
    let overrides =
        !(args.categories.is_empty() && args.media.is_empty() && args.redirects.is_empty());
    let base = match settings.locales.get(&lang) {
        Some(locale) => locale.clone(),
        None if overrides => LocaleConfig::new::<&str>(&lang, &[], &[])?,
        None => return Err(settings.locales.require(&lang).unwrap_err().into()),
    };
    if !overrides {
        return Ok(base);
    }
    let join = |have: &[String], extra: &[String]| -> Vec<String> {
        have.iter().chain(extra).cloned().collect()
    };
    Ok(LocaleConfig::with_redirects(
        &lang,
        &join(base.category_aliases(), &args.categories),
        &join(base.media_aliases(), &args.media),
        &join(base.redirect_aliases(), &args.redirects),
    )?)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn extract(args: &ExtractArgs, mut settings: Settings) -> Result<ExtractSummary> {
    let locale = resolve_locale(args, &mut settings)?;
    let time_range = TimeRange {
        since: args
            .since
            .as_deref()
            .map(|v| parse_time("since", v))
            .transpose()?,
        until: args
            .until
            .as_deref()
            .map(|v| parse_time("until", v))
            .transpose()?,
    };
    let options = ExtractOptions {
        threads: args.threads.unwrap_or_else(default_threads).max(1),
        time_range,
        ..Default::default()
    };
    let source = open_input(&args.dump)?;
    let mut out = Output::create(args.out.as_deref())?;
    let summary = extract_features_csv(source, &locale, &options, &mut out)
        .with_context(|| format!("reading {}", args.dump.display()))?;
    out.commit()?;
    Ok(summary)
}

fn features(path: &Path) -> Result<impl Iterator<Item = Result<RevisionRecord>>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let rows = read_features_csv(BufReader::new(file))
        .with_context(|| format!("in {}", path.display()))?;
    let path = path.to_path_buf();
    Ok(rows.map(move |r| r.with_context(|| format!("in {}", path.display()))))
}

fn labeled(path: &Path) -> Result<Vec<LabeledRow>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_labeled_csv(BufReader::new(file)).with_context(|| format!("in {}", path.display()))
}

fn parse_label(label: &str, map_fr: bool) -> Result<QualityClass> {
    if map_fr {
        return Ok(map_label(label)?);
    }
    match label.parse() {
        Ok(class) => Ok(class),
        Err(e) if map_label(label).is_ok() => bail!("{e}; French labels need --map-fr"),
        Err(e) => Err(e.into()),
    }
}

pub fn calibrate(args: &CalibrateArgs, settings: Settings) -> Result<ModelConfig> {
    if args.features.is_none() && args.labeled.is_none() {
        bail!("nothing to calibrate; give a features CSV and/or --labeled");
    }
    let mut model = ModelConfig {
        language: args.lang.clone().or(settings.model.language),
        ..Default::default()
    };
    if let Some(path) = &args.features {
        let mut acc = ThresholdAccumulator::new();
        if args.all_revisions {
            for row in features(path)? {
                acc.push(&transform(&row?.features));
            }
        } else {
            let mut latest: HashMap<u64, TransformedFeatures> = HashMap::new();
            for row in features(path)? {
                let row = row?;
                latest.insert(row.page_id, transform(&row.features));
            }
            latest.values().for_each(|tf| acc.push(tf));
        }
        if acc.is_empty() {
            bail!("empty dataset: {} has no rows", path.display());
        }
        let minimums = settings
            .model
            .minimums
            .unwrap_or_else(ThresholdSet::global_minimums);
        model.thresholds = Some(acc.finish(&minimums)?);
    }
    if let Some(path) = &args.labeled {
        let rows = labeled(path)?;
        if rows.is_empty() {
            bail!("empty dataset: {} has no rows", path.display());
        }
        let samples = rows
            .iter()
            .map(|r| Ok((r.pred_qual, parse_label(&r.true_label, args.map_fr)?)))
            .collect::<Result<Vec<_>>>()
            .with_context(|| format!("in {}", path.display()))?;
        model.boundaries = Some(derive_class_boundaries(&samples)?);
    }
    let mut out = Output::create(Some(&args.out))?;
    std::io::Write::write_all(&mut out, model.to_ini_string().as_bytes())
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    out.commit()?;
    Ok(model)
}

pub fn score(args: &ScoreArgs, settings: Settings) -> Result<u64> {
    let thresholds = pick(
        args.thresholds.as_ref(),
        "thresholds",
        |m| m.thresholds,
        settings.model.thresholds,
    )?
    .context("missing thresholds; pass --thresholds or run calibrate first")?;
    let mut weights = pick(
        args.weights.as_ref(),
        "weights",
        |m| m.weights,
        settings.model.weights,
    )?
    .unwrap_or_default();
    if args.normalize_weights {
        weights = weights.normalized();
    }
    let boundaries = pick(
        args.boundaries.as_ref(),
        "boundaries",
        |m| m.boundaries,
        None,
    )?;
    let items = match &args.items {
        Some(path) => {
            let file =
                File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            read_item_map(BufReader::new(file)).with_context(|| format!("in {}", path.display()))?
        }
        None => HashMap::new(),
    };
    score_rows(
        features(&args.features)?,
        &thresholds,
        &weights,
        boundaries,
        &items,
        args.out.as_deref(),
    )
}

fn score_rows(
    rows: impl Iterator<Item = Result<RevisionRecord>>,
    thresholds: &ThresholdSet,
    weights: &WeightSet,
    boundaries: Option<wikiqual_core::ClassBoundaries>,
    items: &HashMap<u64, String>,
    out: Option<&Path>,
) -> Result<u64> {
    let mut sink = Output::create(out)?;
    let mut writer = ScoresCsvWriter::new(&mut sink, boundaries.is_some())?;
    for row in rows {
        let row = row?;
        let pred_qual = wikiqual_core::score(&transform(&row.features), thresholds, weights);
        writer.write(&ScoreRecord {
            revision_id: row.revision_id,
            page_id: row.page_id,
            item_id: items.get(&row.page_id).cloned(),
            pred_qual,
            pred_class: boundaries.as_ref().map(|b| b.classify(pred_qual)),
        })?;
    }
    let n = writer.finish()?;
    sink.commit()?;
    Ok(n)
}

pub fn evaluate(args: &EvaluateArgs, settings: Settings) -> Result<wikiqual_core::EvalReport> {
    let boundaries = pick(
        args.boundaries.as_ref(),
        "boundaries",
        |m| m.boundaries,
        settings.model.boundaries,
    )?
    .context("missing class boundaries; pass --boundaries")?;
    let rows = labeled(&args.labeled)?;
    let scores: Vec<f64> = rows.iter().map(|r| r.pred_qual).collect();
    let preds: Vec<QualityClass> = scores.iter().map(|&s| boundaries.classify(s)).collect();
    let truths = rows
        .iter()
        .map(|r| parse_label(&r.true_label, args.map_fr))
        .collect::<Result<Vec<_>>>()
        .with_context(|| format!("in {}", args.labeled.display()))?;
    let basis = if args.m1_class_ranks {
        M1Basis::PredictedClasses
    } else {
        M1Basis::Scores
    };
    let report = evaluate_with(&scores, &preds, &truths, basis)?;
    if let Some(path) = &args.out {
        let mut out = Output::create(Some(path))?;
        std::io::Write::write_all(&mut out, report.to_key_values().as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?;
        out.commit()?;
    }
    Ok(report)
}
