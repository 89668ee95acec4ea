//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../../core/tests/oracles/mod.rs"]
mod oracles;
mod synth;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::panic;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wikiqual_cli::args::{CalibrateArgs, EvaluateArgs, ExtractArgs, ScoreArgs};
use wikiqual_cli::commands;
use wikiqual_cli::settings::Settings;
use wikiqual_core::dump::{extract_features_csv, read_labeled_csv, ExtractOptions};
use wikiqual_core::evaluation::{
    alignment_metrics, confusion_matrix, evaluate, french_label, map_label, spearman,
};
use wikiqual_core::model::score_raw;
use wikiqual_core::{
    compute_thresholds, extract_features, feature_score, percentile, score, Feature,
    LocaleRegistry, ModelConfig, QualityClass, RawFeatures, ThresholdSet, TransformedFeatures,
    WeightSet,
};

#[global_allocator]
static GLOBAL: alloc::Tracking = alloc::Tracking;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_example() -> Outcome {
    let partial = feature_score(5.0, 14.0).map_err(|e| e.to_string())?;
    let full = feature_score(20.0, 14.0).map_err(|e| e.to_string())?;
    check((partial - 0.357143).abs() <= 1e-6, || {
        format!("feature_score(5, 14) = {partial}")
    })?;
    check(full == 1.0, || format!("feature_score(20, 14) = {full}"))?;
    Ok(format!(
        "feature_score(5, 14) = {partial:.6}, feature_score(20, 14) = {full}"
    ))
}

fn rumba_fixture() -> Outcome {
    let text = include_str!("../../../core/tests/fixtures/catalan_rumba.wikitext");
    let en = LocaleRegistry::bundled().get("en").unwrap().clone();
    let start = Instant::now();
    let f = extract_features(text, &en).as_array();
    let elapsed = start.elapsed();
    check(f == [3434, 3, 3, 41, 1, 0], || format!("got {f:?}"))?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{f:?} in {elapsed:?}"))
}

fn default_weights() -> Outcome {
    let w = WeightSet::default();
    let expected = [
        (Feature::PageLength, 0.395),
        (Feature::References, 0.181),
        (Feature::Sections, 0.123),
        (Feature::Wikilinks, 0.115),
        (Feature::Media, 0.114),
        (Feature::Categories, 0.070),
    ];
    for (f, v) in expected {
        check(w.get(f) == v, || {
            format!("{} weight {} != {v}", f.key(), w.get(f))
        })?;
    }
    check((w.sum() - 0.998).abs() <= 1e-12, || {
        format!("sum {}", w.sum())
    })?;
    let th = ThresholdSet::global_minimums();
    let saturated = TransformedFeatures {
        page_length_t: 1e4,
        refs_t: 10.0,
        sections_t: 10.0,
        wikilinks_t: 10.0,
        categories_t: 100.0,
        media_t: 100.0,
    };
    let s = score(&saturated, &th, &w);
    let n = score(&saturated, &th, &w.normalized());
    check((s - 0.998).abs() <= 1e-9, || format!("saturated score {s}"))?;
    check((n - 1.0).abs() <= 1e-9, || {
        format!("normalized saturated score {n}")
    })?;
    Ok(format!(
        "sum = {}, saturated = {s}, normalized = {n}",
        w.sum()
    ))
}

fn threshold_floor() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xF100);
    let mins = ThresholdSet::global_minimums();
    let mut above = 0;
    for round in 0..1000 {
        let n = rng.gen_range(1..200);
        let scale = rng.gen_range(0.1..4.0);
        let data: Vec<TransformedFeatures> = (0..n)
            .map(|_| TransformedFeatures {
                page_length_t: rng.gen_range(0.0..150.0) * scale,
                refs_t: rng.gen_range(0.0..0.2) * scale,
                sections_t: rng.gen_range(0.0..0.15) * scale,
                wikilinks_t: rng.gen_range(0.0..0.15) * scale,
                categories_t: (rng.gen_range(0.0..8.0) * scale).floor(),
                media_t: (rng.gen_range(0.0..4.0) * scale).floor(),
            })
            .collect();
        let t = compute_thresholds(&data, &mins).map_err(|e| e.to_string())?;
        for f in Feature::ALL {
            let column: Vec<f64> = data.iter().map(|d| d.get(f)).collect();
            let p95 = oracles::percentile(&column, 0.95);
            check(t.get(f) >= mins.get(f), || {
                format!("round {round}: {} below minimum", f.key())
            })?;
            if p95 > mins.get(f) {
                above += 1;
                check(t.get(f) == p95, || {
                    format!("round {round}: {} = {} but p95 = {p95}", f.key(), t.get(f))
                })?;
            } else {
                check(t.get(f) == mins.get(f), || {
                    format!("round {round}: {} not floored", f.key())
                })?;
            }
        }
    }
    Ok(format!(
        "1000 datasets, {above} thresholds taken from p95, rest floored"
    ))
}

fn percentile_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x9E95);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=500);
        let values: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    rng.gen_range(0..5) as f64
                } else {
                    rng.gen_range(-1e4..1e4)
                }
            })
            .collect();
        let p = if rng.gen_bool(0.5) {
            0.95
        } else {
            rng.gen_range(0.0..=1.0)
        };
        let got = percentile(&values, p).map_err(|e| e.to_string())?;
        let delta = (got - oracles::percentile(&values, p)).abs();
        worst = worst.max(delta);
        check(delta < 1e-9, || format!("n={n} p={p}: |delta| = {delta}"))?;
    }
    Ok(format!("1000 lists, max |delta| = {worst:e}"))
}

fn spearman_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5EA);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 200 {
        let n = rng.gen_range(3..=120);
        let levels = rng.gen_range(2..=6);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                if rng.gen_bool(0.6) {
                    x + rng.gen_range(0..2) as f64
                } else {
                    rng.gen_range(0..levels) as f64
                }
            })
            .collect();
        let Ok(got) = spearman(&xs, &ys) else {
            continue;
        };
        let delta = (got - oracles::spearman(&xs, &ys)).abs();
        worst = worst.max(delta);
        check(delta < 1e-12, || format!("|delta| = {delta} at n={n}"))?;
        done += 1;
    }
    for i in 0..50 {
        let n = rng.gen_range(3..100);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..50.0)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..50.0)).collect();
        let base = spearman(&xs, &ys).map_err(|e| e.to_string())?;
        let lin: Vec<f64> = xs.iter().map(|x| 2.0 * x + 3.0).collect();
        let cube: Vec<f64> = ys.iter().map(|y| y.powi(3)).collect();
        let log: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        for other in [
            spearman(&lin, &ys),
            spearman(&xs, &cube),
            spearman(&log, &cube),
        ] {
            let v = other.map_err(|e| e.to_string())?;
            check((v - base).abs() < 1e-12, || {
                format!("sample {i}: {v} vs {base}")
            })?;
        }
    }
    Ok(format!(
        "200 tied samples, max |delta| = {worst:e}; 50 monotone-invariance samples"
    ))
}

fn metric_ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x0D3);
    for i in 0..500 {
        let n = rng.gen_range(1..300);
        let bias = rng.gen_range(0.0..1.0);
        let truths: Vec<QualityClass> = (0..n)
            .map(|_| QualityClass::ALL[rng.gen_range(0..6)])
            .collect();
        let preds: Vec<QualityClass> = truths
            .iter()
            .map(|&t| {
                if rng.gen_bool(bias) {
                    let r = (t.index() as i64 + rng.gen_range(-1..=1)).clamp(0, 5);
                    QualityClass::ALL[r as usize]
                } else {
                    QualityClass::ALL[rng.gen_range(0..6)]
                }
            })
            .collect();
        let (m2, m3, m4) = alignment_metrics(&preds, &truths).map_err(|e| e.to_string())?;
        check(m2 <= m3 && m3 <= m4, || {
            format!("sample {i}: {m2} {m3} {m4}")
        })?;
        let cm = confusion_matrix(&preds, &truths).map_err(|e| e.to_string())?;
        let diag = cm.diagonal() as f64 * 100.0 / n as f64;
        check(diag == m2, || {
            format!("sample {i}: diagonal {diag} != m2 {m2}")
        })?;
    }
    Ok("500 samples".into())
}

const TEMPLATE_SHARE: f64 = 0.5;

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name);
    let (xml, labels) = synth::tiered_dump(1000, TEMPLATE_SHARE, 0xE2E);
    fs::write(path("dump.xml"), xml).map_err(|e| e.to_string())?;
    let fail = |e: anyhow::Error| wikiqual_cli::one_line(&e);

    let summary = commands::extract(
        &ExtractArgs {
            dump: path("dump.xml"),
            lang: Some("en".into()),
            out: Some(path("features.csv")),
            threads: Some(4),
            since: None,
            until: None,
            locales: None,
            categories: vec![],
            media: vec![],
            redirects: vec![],
        },
        Settings::default(),
    )
    .map_err(fail)?;
    check(summary.revisions_written == 1000, || format!("{summary:?}"))?;

    commands::calibrate(
        &CalibrateArgs {
            features: Some(path("features.csv")),
            labeled: None,
            out: path("thresholds.ini"),
            lang: Some("en".into()),
            all_revisions: false,
            map_fr: false,
        },
        Settings::default(),
    )
    .map_err(fail)?;

    commands::score(
        &ScoreArgs {
            features: path("features.csv"),
            thresholds: Some(path("thresholds.ini")),
            weights: None,
            boundaries: None,
            normalize_weights: false,
            items: None,
            out: Some(path("scores.csv")),
        },
        Settings::default(),
    )
    .map_err(fail)?;

    let truth: HashMap<u64, QualityClass> = labels.into_iter().collect();
    let scores = fs::read_to_string(path("scores.csv")).map_err(|e| e.to_string())?;
    let mut labeled = String::from("revision_id,pred_qual,true_label\n");
    for line in scores.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let page: u64 = cols[1].parse().map_err(|_| line.to_string())?;
        writeln!(labeled, "{},{},{}", cols[0], cols[3], truth[&page]).unwrap();
    }
    fs::write(path("labeled.csv"), labeled).map_err(|e| e.to_string())?;

    commands::calibrate(
        &CalibrateArgs {
            features: None,
            labeled: Some(path("labeled.csv")),
            out: path("boundaries.ini"),
            lang: None,
            all_revisions: false,
            map_fr: false,
        },
        Settings::default(),
    )
    .map_err(fail)?;

    let report = commands::evaluate(
        &EvaluateArgs {
            labeled: path("labeled.csv"),
            boundaries: Some(path("boundaries.ini")),
            map_fr: false,
            m1_class_ranks: false,
            out: Some(path("report.txt")),
        },
        Settings::default(),
    )
    .map_err(fail)?;
    let elapsed = start.elapsed();
    check(report.n == 1000, || format!("n = {}", report.n))?;
    check(report.m2 >= 60.0, || format!("m2 = {:.2}%", report.m2))?;
    check(report.m1 >= 0.9, || format!("m1 = {:.4}", report.m1))?;
    check(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "m1 = {:.4}, m2 = {:.1}%, m3 = {:.1}%, m4 = {:.1}% in {:.1?}",
        report.m1, report.m2, report.m3, report.m4, elapsed
    ))
}

const STREAM_BYTES: u64 = 100 << 20;
const BIG_REVISION: usize = 4 << 20;

fn determinism_and_memory() -> Outcome {
    let en = LocaleRegistry::bundled().get("en").unwrap().clone();
    let mut outputs = Vec::new();
    let mut report = String::new();
    for threads in [1, 8] {
        let dump = synth::StreamingDump::new(STREAM_BYTES, BIG_REVISION, 0xD00D);
        let (delivered, largest) = (dump.delivered(), dump.largest_revision());
        let source = BufReader::with_capacity(1 << 16, dump);
        let options = ExtractOptions {
            threads,
            ..Default::default()
        };
        let mut sink = Vec::with_capacity(8 << 20);
        let baseline = alloc::live();
        alloc::reset_peak();
        let start = Instant::now();
        let summary =
            extract_features_csv(source, &en, &options, &mut sink).map_err(|e| e.to_string())?;
        let peak = alloc::peak().saturating_sub(baseline);
        let bytes = delivered.load(Ordering::Relaxed);
        let largest = largest.load(Ordering::Relaxed) as usize;
        check(bytes >= STREAM_BYTES, || {
            format!("only {bytes} bytes streamed")
        })?;
        let limit = 10 * largest + (64 << 20);
        check(peak < limit, || {
            format!(
                "{threads} threads: peak {} MiB >= {} MiB",
                peak >> 20,
                limit >> 20
            )
        })?;
        write!(
            report,
            "{threads} thread(s): {} MiB streamed, {} revisions, largest {} MiB, peak {} MiB (limit {} MiB), {:.1?}; ",
            bytes >> 20,
            summary.revisions_written,
            largest >> 20,
            peak >> 20,
            limit >> 20,
            start.elapsed()
        )
        .unwrap();
        outputs.push(sink);
    }
    check(outputs[0] == outputs[1], || {
        "1-thread and 8-thread CSV differ".into()
    })?;
    write!(report, "outputs identical ({} bytes)", outputs[0].len()).unwrap();
    Ok(report)
}

fn label_mapping() -> Outcome {
    let pairs = [
        ("AdQ", QualityClass::Fa),
        ("BA", QualityClass::Ga),
        ("A", QualityClass::B),
        ("B", QualityClass::C),
        ("BD", QualityClass::Start),
        ("ébauche", QualityClass::Stub),
    ];
    for (fr, en) in pairs {
        let mapped = map_label(fr).map_err(|e| e.to_string())?;
        check(mapped == en, || format!("{fr} -> {mapped}"))?;
        check(french_label(en) == fr, || {
            format!("{en} -> {}", french_label(en))
        })?;
    }
    let bounds = ModelConfig::parse_ini(include_str!(
        "../../../core/tests/fixtures/golden_boundaries.ini"
    ))
    .map_err(|e| e.to_string())?
    .boundaries
    .ok_or("fixture has no boundaries")?;
    let run = |csv: &str, french: bool| -> Result<String, String> {
        let rows = read_labeled_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
        let scores: Vec<f64> = rows.iter().map(|r| r.pred_qual).collect();
        let preds: Vec<QualityClass> = scores.iter().map(|&s| bounds.classify(s)).collect();
        let truths = rows
            .iter()
            .map(|r| {
                if french {
                    map_label(&r.true_label).map_err(|e| e.to_string())
                } else {
                    r.true_label
                        .parse()
                        .map_err(|e: wikiqual_core::model::UnknownClass| e.to_string())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(evaluate(&scores, &preds, &truths)
            .map_err(|e| e.to_string())?
            .to_key_values())
    };
    let en = run(
        include_str!("../../../core/tests/fixtures/golden_eval.csv"),
        false,
    )?;
    let fr = run(
        include_str!("../../../core/tests/fixtures/golden_eval_fr.csv"),
        true,
    )?;
    check(en == fr, || "French twin report differs".into())?;
    Ok("six pairs round-trip; French twin report identical".into())
}

fn empty_article_scores_zero() -> Outcome {
    let s = score_raw(
        &RawFeatures::default(),
        &ThresholdSet::global_minimums(),
        &WeightSet::default(),
    );
    check(s == 0.0, || format!("score {s}"))?;
    Ok("score 0".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("worked example feature score", worked_example),
        ("reference article feature counts", rumba_fixture),
        ("default weights and saturation", default_weights),
        ("threshold floor rule", threshold_floor),
        ("percentile matches sorted reference", percentile_oracle),
        ("spearman matches brute force", spearman_oracle),
        ("metric ordering and confusion diagonal", metric_ordering),
        ("end-to-end synthetic pipeline", end_to_end),
        (
            "parallel determinism and bounded memory",
            determinism_and_memory,
        ),
        ("french label mapping", label_mapping),
        ("empty article", empty_article_scores_zero),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
