//! Dump → features CSV, optionally fanned out over worker threads.
//!
//! One thread owns the XML stream and groups revision texts into batches; a
//! worker pool extracts features; the calling thread writes rows back in batch
//! order, so the output is identical for any thread count. The text held by
//! queued and in-progress batches is capped by a byte budget.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::{Condvar, Mutex};
use std::thread;

use chrono::{DateTime, Utc};
use crossbeam_channel::bounded;

use crate::locale::LocaleConfig;
use crate::wikitext::extract_features;

use super::records::{FeaturesCsvWriter, RevisionRecord};
use super::xml::{stream_revisions, DumpRevision};
use super::DumpError;

/// Revision timestamps to keep: `since` inclusive, `until` exclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TimeRange {
    pub since: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
}

impl TimeRange {
    pub fn is_unbounded(&self) -> bool {
        self.since.is_none() && self.until.is_none()
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.since.is_none_or(|s| t >= s) && self.until.is_none_or(|u| t < u)
    }
}

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub threads: usize,
    pub time_range: TimeRange,
    /// Target amount of wikitext per work batch.
    pub batch_bytes: usize,
    /// Cap on wikitext queued or being processed. A single batch larger than
    /// this is still admitted when nothing else is in flight.
    pub inflight_bytes: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            threads: 1,
            time_range: TimeRange::default(),
            batch_bytes: 1 << 20,
            inflight_bytes: 32 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub pages_seen: u64,
    pub article_pages: u64,
    pub skipped_namespace_pages: u64,
    pub skipped_redirect_pages: u64,
    pub revisions_seen: u64,
    pub skipped_redirect_revisions: u64,
    pub skipped_out_of_range: u64,
    pub revisions_written: u64,
}

/// Applies the article, redirect and time filters and keeps the counters.
struct Filter<'a> {
    locale: &'a LocaleConfig,
    range: TimeRange,
    summary: ExtractSummary,
    last_page: Option<u64>,
}

impl Filter<'_> {
    fn accept(&mut self, item: &DumpRevision) -> Result<bool, DumpError> {
        let page = &item.page;
        let new_page = self.last_page != Some(page.page_id);
        self.last_page = Some(page.page_id);
        self.summary.revisions_seen += 1;
        if page.namespace != 0 {
            self.summary.skipped_namespace_pages += u64::from(new_page);
            return Ok(false);
        }
        if page.redirect {
            self.summary.skipped_redirect_pages += u64::from(new_page);
            return Ok(false);
        }
        self.summary.article_pages += u64::from(new_page);
        if !self.range.is_unbounded() {
            let ts = &item.revision.timestamp;
            let t = DateTime::parse_from_rfc3339(ts).map_err(|_| DumpError::InvalidField {
                field: "timestamp",
                value: ts.clone(),
                offset: 0,
            })?;
            if !self.range.contains(t.with_timezone(&Utc)) {
                self.summary.skipped_out_of_range += 1;
                return Ok(false);
            }
        }
        if self.locale.is_redirect_text(&item.revision.text) {
            self.summary.skipped_redirect_revisions += 1;
            return Ok(false);
        }
        Ok(true)
    }
}

fn record_for(item: &DumpRevision, locale: &LocaleConfig) -> RevisionRecord {
    RevisionRecord {
        revision_id: item.revision.revision_id,
        page_id: item.page.page_id,
        timestamp: Some(item.revision.timestamp.clone()),
        features: extract_features(&item.revision.text, locale),
    }
}

/// Streams `source`, keeps main-namespace non-redirect revisions, and writes
/// one features row per revision to `sink`.
///
/// If the dump is truncated, the rows for all complete revisions are written
/// before the error is returned.
pub fn extract_features_csv<R, W>(
    source: R,
    locale: &LocaleConfig,
    options: &ExtractOptions,
    sink: W,
) -> Result<ExtractSummary, DumpError>
where
    R: BufRead + Send,
    W: Write,
{
    let mut writer = FeaturesCsvWriter::new(sink)?;
    let filter = Filter {
        locale,
        range: options.time_range,
        summary: ExtractSummary::default(),
        last_page: None,
    };
    let outcome = if options.threads <= 1 {
        run_sequential(source, filter, &mut writer)
    } else {
        run_parallel(source, filter, options, &mut writer)
    };
    let mut summary = outcome?;
    summary.revisions_written = writer.finish()?;
    Ok(summary)
}

fn run_sequential<R: BufRead, W: Write>(
    source: R,
    mut filter: Filter<'_>,
    writer: &mut FeaturesCsvWriter<W>,
) -> Result<ExtractSummary, DumpError> {
    let mut stream = stream_revisions(source);
    for item in stream.by_ref() {
        let item = item?;
        if filter.accept(&item)? {
            writer.write(&record_for(&item, filter.locale))?;
        }
    }
    filter.summary.pages_seen = stream.pages_seen();
    Ok(filter.summary)
}

struct Batch {
    seq: u64,
    bytes: usize,
    items: Vec<DumpRevision>,
}

/// Counting semaphore over bytes of wikitext in flight.
struct ByteBudget {
    state: Mutex<(usize, bool)>,
    freed: Condvar,
    limit: usize,
}

impl ByteBudget {
    fn new(limit: usize) -> Self {
        ByteBudget {
            state: Mutex::new((0, false)),
            freed: Condvar::new(),
            limit,
        }
    }

    /// Blocks until `n` bytes fit. Returns false once the budget is closed.
    fn acquire(&self, n: usize) -> bool {
        let mut state = self.state.lock().unwrap();
        while !state.1 && state.0 > 0 && state.0 + n > self.limit {
            state = self.freed.wait(state).unwrap();
        }
        if state.1 {
            return false;
        }
        state.0 += n;
        true
    }

    fn release(&self, n: usize) {
        let mut state = self.state.lock().unwrap();
        state.0 -= n;
        self.freed.notify_all();
    }

    fn close(&self) {
        self.state.lock().unwrap().1 = true;
        self.freed.notify_all();
    }
}

fn run_parallel<R, W>(
    source: R,
    mut filter: Filter<'_>,
    options: &ExtractOptions,
    writer: &mut FeaturesCsvWriter<W>,
) -> Result<ExtractSummary, DumpError>
where
    R: BufRead + Send,
    W: Write,
{
    let threads = options.threads;
    let locale = filter.locale;
    let budget = ByteBudget::new(options.inflight_bytes);
    let budget = &budget;
    let (work_tx, work_rx) = bounded::<Batch>(threads);
    let (done_tx, done_rx) = bounded::<(u64, Vec<RevisionRecord>)>(threads * 4);

    thread::scope(|scope| {
        for _ in 0..threads {
            let work_rx = work_rx.clone();
            let done_tx = done_tx.clone();
            scope.spawn(move || {
                for batch in work_rx {
                    let records = batch
                        .items
                        .iter()
                        .map(|item| record_for(item, locale))
                        .collect();
                    let Batch { seq, bytes, items } = batch;
                    drop(items);
                    budget.release(bytes);
                    if done_tx.send((seq, records)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(work_rx);
        drop(done_tx);

        let batch_bytes = options.batch_bytes.max(1);
        let reader = scope.spawn(move || -> Result<ExtractSummary, DumpError> {
            let mut stream = stream_revisions(source);
            let mut seq = 0;
            let mut pending = Batch {
                seq,
                bytes: 0,
                items: Vec::new(),
            };
            let send = |batch: Batch| -> bool {
                budget.acquire(batch.bytes) && work_tx.send(batch).is_ok()
            };
            let mut result = Ok(());
            for item in stream.by_ref() {
                let item = match item {
                    Ok(item) => item,
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                };
                match filter.accept(&item) {
                    Ok(true) => {}
                    Ok(false) => continue,
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
                pending.bytes += item.revision.text.len();
                pending.items.push(item);
                if pending.bytes >= batch_bytes {
                    seq += 1;
                    let full = std::mem::replace(
                        &mut pending,
                        Batch {
                            seq,
                            bytes: 0,
                            items: Vec::new(),
                        },
                    );
                    if !send(full) {
                        // writer gave up; its error is reported instead
                        return Ok(filter.summary);
                    }
                }
            }
            // complete revisions before a parse error are still written
            if !pending.items.is_empty() {
                send(pending);
            }
            filter.summary.pages_seen = stream.pages_seen();
            result.map(|()| filter.summary)
        });

        let mut reorder: BTreeMap<u64, Vec<RevisionRecord>> = BTreeMap::new();
        let mut next = 0;
        let mut write_result = Ok(());
        'recv: for (seq, records) in done_rx.iter() {
            reorder.insert(seq, records);
            while let Some(records) = reorder.remove(&next) {
                for record in &records {
                    if let Err(e) = writer.write(record) {
                        write_result = Err(e);
                        break 'recv;
                    }
                }
                next += 1;
            }
        }
        budget.close();
        drop(done_rx);
        let read_result = reader.join().expect("dump reader panicked");
        write_result?;
        read_result
    })
}
