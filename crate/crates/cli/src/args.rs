use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "wikiqual",
    version,
    about = "Structural quality scores for Wikipedia revisions"
)]
pub struct Cli {
    /// Directory holding `locales.ini` and `model.ini` defaults.
    #[arg(long, global = true, env = "WIKIQUAL_CONFIG_DIR", value_name = "DIR")]
    pub config_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract per-revision features from a MediaWiki XML dump (.xml, .gz or .bz2).
    Extract(ExtractArgs),
    /// Derive feature thresholds from a features CSV and/or class boundaries from labeled scores.
    Calibrate(CalibrateArgs),
    /// Score a features CSV.
    Score(ScoreArgs),
    /// Compare scores against editor-assigned labels.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dump path, or `-` for standard input.
    pub dump: PathBuf,
    /// Wiki language code selecting namespace aliases.
    #[arg(long)]
    pub lang: Option<String>,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Keep revisions at or after this time (RFC 3339 or YYYY-MM-DD).
    #[arg(long)]
    pub since: Option<String>,
    /// Keep revisions strictly before this time.
    #[arg(long)]
    pub until: Option<String>,
    /// Extra locale definitions merged over the bundled ones.
    #[arg(long, value_name = "FILE")]
    pub locales: Option<PathBuf>,
    /// Additional category namespace aliases, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub categories: Vec<String>,
    /// Additional media namespace aliases, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub media: Vec<String>,
    /// Additional redirect magic words, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub redirects: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Features CSV used for the thresholds.
    pub features: Option<PathBuf>,
    /// Scored CSV with `revision_id,pred_qual,true_label` used for class boundaries.
    #[arg(long, value_name = "FILE")]
    pub labeled: Option<PathBuf>,
    /// Model file to write.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Language recorded in the model file.
    #[arg(long)]
    pub lang: Option<String>,
    /// Use every revision instead of the latest one per page.
    #[arg(long)]
    pub all_revisions: bool,
    /// Labels are French and are mapped onto the English scale.
    #[arg(long)]
    pub map_fr: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Features CSV.
    pub features: PathBuf,
    /// Model file with a [thresholds] section.
    #[arg(long, value_name = "FILE")]
    pub thresholds: Option<PathBuf>,
    /// Model file with a [weights] section.
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
    /// Model file with a [boundaries] section; adds a `pred_class` column.
    #[arg(long, value_name = "FILE")]
    pub boundaries: Option<PathBuf>,
    /// Rescale weights to sum to 1.
    #[arg(long)]
    pub normalize_weights: bool,
    /// CSV mapping `page_id` to Wikidata `item_id`.
    #[arg(long, value_name = "FILE")]
    pub items: Option<PathBuf>,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Scored CSV with `revision_id,pred_qual,true_label`.
    pub labeled: PathBuf,
    /// Model file with a [boundaries] section.
    #[arg(long, value_name = "FILE")]
    pub boundaries: Option<PathBuf>,
    /// Labels are French and are mapped onto the English scale.
    #[arg(long)]
    pub map_fr: bool,
    /// Correlate predicted class ranks instead of raw scores for m1.
    #[arg(long)]
    pub m1_class_ranks: bool,
    /// Also write the report as `key=value` lines.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}
