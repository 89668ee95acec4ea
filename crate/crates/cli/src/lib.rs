//! Command-line front end: `extract`, `calibrate`, `score` and `evaluate`.

pub mod args;
pub mod commands;
pub mod io;
pub mod settings;

use std::error::Error;

use anyhow::Result;

use args::{Cli, Command};
use settings::Settings;

pub fn run(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.config_dir.as_deref())?;
    match &cli.command {
        Command::Extract(args) => {
            let s = commands::extract(args, settings)?;
            eprintln!(
                "pages seen: {}, articles: {}, revisions written: {}, skipped: {} non-article pages, \
                 {} redirect pages, {} redirect revisions, {} out of time range",
                s.pages_seen,
                s.article_pages,
                s.revisions_written,
                s.skipped_namespace_pages,
                s.skipped_redirect_pages,
                s.skipped_redirect_revisions,
                s.skipped_out_of_range,
            );
        }
        Command::Calibrate(args) => {
            commands::calibrate(args, settings)?;
            eprintln!("wrote {}", args.out.display());
        }
        Command::Score(args) => {
            let n = commands::score(args, settings)?;
            eprintln!("scored {n} revisions");
        }
        Command::Evaluate(args) => {
            let report = commands::evaluate(args, settings)?;
            print!("{report}");
        }
    }
    Ok(())
}

/// Joins an error and its causes on one line, skipping causes whose text the
/// outer message already includes.
pub fn one_line(err: &anyhow::Error) -> String {
    let mut line = err.to_string();
    let mut cause: Option<&dyn Error> = err.source();
    while let Some(c) = cause {
        let text = c.to_string();
        if !line.contains(&text) {
            line.push_str(": ");
            line.push_str(&text);
        }
        cause = c.source();
    }
    line.replace('\n', " ")
}
