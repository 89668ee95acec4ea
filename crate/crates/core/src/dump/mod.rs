//! MediaWiki XML dumps in, feature and score CSVs out.

mod pipeline;
mod records;
mod xml;

use std::io;

use thiserror::Error;

pub use pipeline::{extract_features_csv, ExtractOptions, ExtractSummary, TimeRange};
pub use records::{
    read_features_csv, read_item_map, read_labeled_csv, write_features_csv, write_scores_csv,
    FeaturesCsvWriter, LabeledRow, RevisionRecord, ScoreRecord, ScoresCsvWriter, FEATURES_HEADER,
    SCORES_HEADER,
};
pub use xml::{is_article, stream_revisions, DumpRevision, PageMeta, Revision, RevisionStream};

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed XML at byte {offset}: {source}")]
    Xml {
        offset: u64,
        #[source]
        source: quick_xml::Error,
    },
    #[error("dump truncated at byte {offset} inside <{element}>")]
    Truncated { offset: u64, element: String },
    #[error("no <mediawiki> root element")]
    MissingRoot,
    #[error("invalid <{field}> value `{value}` at byte {offset}")]
    InvalidField {
        field: &'static str,
        value: String,
        offset: u64,
    },
    #[error("write failed after {rows_written} rows: {source}")]
    Write {
        rows_written: u64,
        #[source]
        source: io::Error,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}
