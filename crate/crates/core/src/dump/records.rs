//! CSV datasets: per-revision features, per-revision scores, and the labeled
//! and item-id side inputs.
//!
//! Output is written without quoting, with LF line endings; every field is
//! numeric or a Wikidata id.

use std::collections::HashMap;
use std::io::{self, Read, Write};

use crate::model::QualityClass;
use crate::wikitext::RawFeatures;

use super::DumpError;

pub const FEATURES_HEADER: &str =
    "revision_id,page_id,page_length,num_refs,num_sections,num_wikilinks,num_categories,num_media";
pub const SCORES_HEADER: &str = "revision_id,page_id,item_id,pred_qual";

const FEATURE_COLUMNS: [&str; 6] = [
    "page_length",
    "num_refs",
    "num_sections",
    "num_wikilinks",
    "num_categories",
    "num_media",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionRecord {
    pub revision_id: u64,
    pub page_id: u64,
    /// Known when the record comes from a dump; feature CSVs do not store it.
    pub timestamp: Option<String>,
    pub features: RawFeatures,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub revision_id: u64,
    pub page_id: u64,
    pub item_id: Option<String>,
    pub pred_qual: f64,
    pub pred_class: Option<QualityClass>,
}

pub struct FeaturesCsvWriter<W: Write> {
    sink: W,
    rows: u64,
}

impl<W: Write> FeaturesCsvWriter<W> {
    pub fn new(mut sink: W) -> Result<Self, DumpError> {
        writeln!(sink, "{FEATURES_HEADER}").map_err(|source| DumpError::Write {
            rows_written: 0,
            source,
        })?;
        Ok(FeaturesCsvWriter { sink, rows: 0 })
    }

    pub fn write(&mut self, record: &RevisionRecord) -> Result<(), DumpError> {
        let f = &record.features;
        writeln!(
            self.sink,
            "{},{},{},{},{},{},{},{}",
            record.revision_id,
            record.page_id,
            f.num_chars,
            f.num_refs,
            f.num_headings,
            f.num_wikilinks,
            f.num_categories,
            f.num_media
        )
        .map_err(|source| self.write_error(source))?;
        self.rows += 1;
        Ok(())
    }

    fn write_error(&self, source: io::Error) -> DumpError {
        DumpError::Write {
            rows_written: self.rows,
            source,
        }
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    /// Flushes and returns the number of data rows.
    pub fn finish(mut self) -> Result<u64, DumpError> {
        self.sink.flush().map_err(|e| self.write_error(e))?;
        Ok(self.rows)
    }
}

pub fn write_features_csv<'a, I, W>(records: I, sink: W) -> Result<u64, DumpError>
where
    I: IntoIterator<Item = &'a RevisionRecord>,
    W: Write,
{
    let mut writer = FeaturesCsvWriter::new(sink)?;
    for record in records {
        writer.write(record)?;
    }
    writer.finish()
}

pub struct ScoresCsvWriter<W: Write> {
    sink: W,
    rows: u64,
    with_class: bool,
}

impl<W: Write> ScoresCsvWriter<W> {
    /// With `with_class`, a trailing `pred_class` column is added.
    pub fn new(mut sink: W, with_class: bool) -> Result<Self, DumpError> {
        let extra = if with_class { ",pred_class" } else { "" };
        writeln!(sink, "{SCORES_HEADER}{extra}").map_err(|source| DumpError::Write {
            rows_written: 0,
            source,
        })?;
        Ok(ScoresCsvWriter {
            sink,
            rows: 0,
            with_class,
        })
    }

    pub fn write(&mut self, record: &ScoreRecord) -> Result<(), DumpError> {
        let item = record.item_id.as_deref().unwrap_or("");
        let res = if self.with_class {
            let class = record.pred_class.map(QualityClass::label).unwrap_or("");
            writeln!(
                self.sink,
                "{},{},{},{:.6},{}",
                record.revision_id, record.page_id, item, record.pred_qual, class
            )
        } else {
            writeln!(
                self.sink,
                "{},{},{},{:.6}",
                record.revision_id, record.page_id, item, record.pred_qual
            )
        };
        res.map_err(|source| DumpError::Write {
            rows_written: self.rows,
            source,
        })?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<u64, DumpError> {
        let rows = self.rows;
        self.sink.flush().map_err(|source| DumpError::Write {
            rows_written: rows,
            source,
        })?;
        Ok(rows)
    }
}

pub fn write_scores_csv<'a, I, W>(records: I, sink: W, with_class: bool) -> Result<u64, DumpError>
where
    I: IntoIterator<Item = &'a ScoreRecord>,
    W: Write,
{
    let mut writer = ScoresCsvWriter::new(sink, with_class)?;
    for record in records {
        writer.write(record)?;
    }
    writer.finish()
}

fn csv_error(err: csv::Error) -> DumpError {
    let line = err.position().map_or(0, |p| p.line());
    DumpError::Csv {
        line,
        message: err.to_string(),
    }
}

struct Columns {
    headers: csv::StringRecord,
}

impl Columns {
    fn required(&self, name: &str) -> Result<usize, DumpError> {
        self.optional(name)
            .ok_or_else(|| DumpError::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.trim() == name)
    }
}

fn reader<R: Read>(source: R) -> Result<(csv::Reader<R>, Columns), DumpError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    Ok((reader, Columns { headers }))
}

fn field(record: &csv::StringRecord, idx: usize) -> &str {
    record.get(idx).unwrap_or("").trim()
}

fn parse_u64(record: &csv::StringRecord, idx: usize, name: &str) -> Result<u64, DumpError> {
    let raw = field(record, idx);
    raw.parse().map_err(|_| DumpError::Csv {
        line: record.position().map_or(0, |p| p.line()),
        message: format!("{name}: expected a non-negative integer, got `{raw}`"),
    })
}

/// Reads a features CSV written by [`write_features_csv`]. Extra columns are ignored.
pub fn read_features_csv<R: Read>(
    source: R,
) -> Result<impl Iterator<Item = Result<RevisionRecord, DumpError>>, DumpError> {
    let (reader, columns) = reader(source)?;
    let rev = columns.required("revision_id")?;
    let page = columns.required("page_id")?;
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(FEATURE_COLUMNS) {
        *slot = columns.required(name)?;
    }
    Ok(reader.into_records().map(move |row| {
        let row = row.map_err(csv_error)?;
        let mut values = [0u64; 6];
        for (v, (&i, name)) in values.iter_mut().zip(idx.iter().zip(FEATURE_COLUMNS)) {
            *v = parse_u64(&row, i, name)?;
        }
        Ok(RevisionRecord {
            revision_id: parse_u64(&row, rev, "revision_id")?,
            page_id: parse_u64(&row, page, "page_id")?,
            timestamp: None,
            features: RawFeatures::from_array(values),
        })
    }))
}

/// A scored revision with its editor-assigned label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub revision_id: u64,
    pub pred_qual: f64,
    pub true_label: String,
    pub language: Option<String>,
}

/// Reads `revision_id,pred_qual,true_label[,language]` (any column order).
pub fn read_labeled_csv<R: Read>(source: R) -> Result<Vec<LabeledRow>, DumpError> {
    let (mut reader, columns) = reader(source)?;
    let rev = columns.required("revision_id")?;
    let qual = columns.required("pred_qual")?;
    let label = columns.required("true_label")?;
    let lang = columns.optional("language");
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let raw_qual = field(&row, qual);
        let pred_qual = raw_qual
            .parse::<f64>()
            .ok()
            .filter(|q| q.is_finite())
            .ok_or_else(|| DumpError::Csv {
                line: row.position().map_or(0, |p| p.line()),
                message: format!("pred_qual: expected a number, got `{raw_qual}`"),
            })?;
        rows.push(LabeledRow {
            revision_id: parse_u64(&row, rev, "revision_id")?,
            pred_qual,
            true_label: field(&row, label).to_string(),
            language: lang
                .map(|i| field(&row, i).to_string())
                .filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}

/// Reads a `page_id,item_id` mapping.
pub fn read_item_map<R: Read>(source: R) -> Result<HashMap<u64, String>, DumpError> {
    let (mut reader, columns) = reader(source)?;
    let page = columns.required("page_id")?;
    let item = columns.required("item_id")?;
    let mut map = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let item_id = field(&row, item);
        if !item_id.is_empty() {
            map.insert(parse_u64(&row, page, "page_id")?, item_id.to_string());
        }
    }
    Ok(map)
}
