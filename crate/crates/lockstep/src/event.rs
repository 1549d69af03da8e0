//! Download-event model: parsing, domain normalization, whitelist filtering,
//! and the append-only event table.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psl::{normalize_domain, PublicSuffixRules};

/// One observed edge: a downloader retrieved a payload from a domain.
///
/// `domain` is already SLD-normalized; `event_id`s are unique and assigned in
/// ascending time order within the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownloadEvent {
    pub event_id: u64,
    pub downloader: String,
    pub domain: String,
    pub payload: String,
    pub timestamp: i64,
}

/// Downloaders considered benign; membership is exact-match.
#[derive(Debug, Clone, Default)]
pub struct Whitelist {
    downloaders: HashSet<String>,
}

impl Whitelist {
    pub fn new<I: IntoIterator<Item = String>>(ids: I) -> Self {
        Whitelist {
            downloaders: ids.into_iter().collect(),
        }
    }

    /// One downloader identifier per line; blank lines ignored.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from),
        ))
    }

    pub fn contains(&self, downloader: &str) -> bool {
        self.downloaders.contains(downloader)
    }

    pub fn len(&self) -> usize {
        self.downloaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.downloaders.is_empty()
    }
}

/// Keeps the events whose downloader is not whitelisted, preserving order.
/// Returns the survivors and the number removed.
pub fn filter_whitelisted(
    events: Vec<DownloadEvent>,
    wl: &Whitelist,
) -> (Vec<DownloadEvent>, usize) {
    let before = events.len();
    let kept: Vec<DownloadEvent> = events
        .into_iter()
        .filter(|e| !wl.contains(&e.downloader))
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// A raw record before normalization and id assignment.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub downloader: String,
    pub raw_host: String,
    pub payload: String,
    pub timestamp: i64,
}

/// Parses one tab-separated line: downloader, host, payload, timestamp.
pub fn parse_record(line: &str, line_no: usize) -> Result<RawRecord> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(Error::MalformedRecord {
            line: line_no,
            reason: format!("expected 4 tab-separated fields, got {}", fields.len()),
        });
    }
    let timestamp: i64 = fields[3].trim().parse().map_err(|_| Error::MalformedRecord {
        line: line_no,
        reason: format!("bad timestamp {:?}", fields[3]),
    })?;
    if fields[0].is_empty() || fields[1].is_empty() || fields[2].is_empty() {
        return Err(Error::MalformedRecord {
            line: line_no,
            reason: "empty field".into(),
        });
    }
    Ok(RawRecord {
        downloader: fields[0].to_string(),
        raw_host: fields[1].to_string(),
        payload: fields[2].to_string(),
        timestamp,
    })
}

/// Outcome of ingesting one batch into the event table.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EventBatch {
    pub first_event_id: u64,
    pub count: usize,
    pub min_timestamp: Option<i64>,
    pub max_timestamp: Option<i64>,
    /// Lines skipped with a per-record diagnostic.
    pub malformed: usize,
    /// Events whose domain had no registrable form.
    pub rejected_domains: usize,
    /// Events removed by the whitelist.
    pub whitelisted: usize,
    /// Set when the batch maximum precedes the table maximum seen so far.
    pub out_of_order: bool,
    pub diagnostics: Vec<String>,
}

/// Append-only table of normalized, whitelist-filtered download events,
/// sorted by (timestamp, arrival order) within each batch. Single-writer;
/// reads may be concurrent once no writer is active.
#[derive(Debug, Default)]
pub struct EventTable {
    events: Vec<DownloadEvent>,
    max_timestamp: Option<i64>,
}

impl EventTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[DownloadEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn get(&self, event_id: u64) -> Option<&DownloadEvent> {
        self.events.get(event_id as usize)
    }

    pub fn max_timestamp(&self) -> Option<i64> {
        self.max_timestamp
    }

    /// Normalizes, filters and appends a batch of raw records. Events are
    /// sorted by timestamp (ties keep input order) before ids are assigned,
    /// so ids ascend with time within the batch. Returns the batch summary
    /// together with the events that were appended.
    pub fn ingest_batch(
        &mut self,
        records: Vec<(usize, RawRecord)>,
        rules: &PublicSuffixRules,
        wl: &Whitelist,
    ) -> (EventBatch, Vec<DownloadEvent>) {
        let mut batch = EventBatch {
            first_event_id: self.events.len() as u64,
            ..EventBatch::default()
        };
        let mut pending: Vec<(i64, usize, RawRecord, String)> = Vec::new();
        for (line_no, rec) in records {
            match normalize_domain(&rec.raw_host, rules) {
                Ok(domain) => {
                    if wl.contains(&rec.downloader) {
                        batch.whitelisted += 1;
                        continue;
                    }
                    pending.push((rec.timestamp, pending.len(), rec, domain));
                }
                Err(e) => {
                    batch.rejected_domains += 1;
                    if batch.diagnostics.len() < 32 {
                        batch.diagnostics.push(format!("line {line_no}: {e}"));
                    }
                }
            }
        }
        pending.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut appended = Vec::with_capacity(pending.len());
        for (ts, _, rec, domain) in pending {
            let event = DownloadEvent {
                event_id: self.events.len() as u64,
                downloader: rec.downloader,
                domain,
                payload: rec.payload,
                timestamp: ts,
            };
            appended.push(event.clone());
            self.events.push(event);
        }
        batch.count = appended.len();
        batch.min_timestamp = appended.first().map(|e| e.timestamp);
        batch.max_timestamp = appended.last().map(|e| e.timestamp);
        if let (Some(batch_max), Some(table_max)) = (batch.max_timestamp, self.max_timestamp) {
            if batch_max < table_max {
                batch.out_of_order = true;
            }
        }
        self.max_timestamp = match (self.max_timestamp, batch.max_timestamp) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        (batch, appended)
    }

    /// Parses tab-separated text (lines starting with `#` ignored) and
    /// ingests it. Malformed lines are skipped with a diagnostic.
    pub fn ingest_text(
        &mut self,
        text: &str,
        rules: &PublicSuffixRules,
        wl: &Whitelist,
    ) -> (EventBatch, Vec<DownloadEvent>) {
        let mut records = Vec::new();
        let mut malformed = 0usize;
        let mut diagnostics = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match parse_record(trimmed, line_no) {
                Ok(rec) => records.push((line_no, rec)),
                Err(e) => {
                    malformed += 1;
                    if diagnostics.len() < 32 {
                        diagnostics.push(e.to_string());
                    }
                }
            }
        }
        let (mut batch, appended) = self.ingest_batch(records, rules, wl);
        batch.malformed = malformed;
        let mut diags = diagnostics;
        diags.append(&mut batch.diagnostics);
        batch.diagnostics = diags;
        (batch, appended)
    }

    /// Writes the whole table as tab-separated lines.
    pub fn dump_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.events {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                e.event_id, e.downloader, e.domain, e.payload, e.timestamp
            )?;
        }
        Ok(())
    }
}
