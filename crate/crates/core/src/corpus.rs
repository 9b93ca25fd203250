//! CHILDES-style CSV corpora: read utterances, convert and fold them, write
//! the same rows back with `phonemized`, `is_child` and `errors` columns.
//!
//! Columns that the schema does not map are carried through untouched, in
//! their original order.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::folding::FoldMap;
use crate::g2p::{Backend, UnmappedReport};
use crate::stream::IpaSegment;

pub const PHONEMIZED_COLUMN: &str = "phonemized";
pub const IS_CHILD_COLUMN: &str = "is_child";
pub const ERRORS_COLUMN: &str = "errors";

/// Days per month used to turn `Y;MM.DD` ages into months.
pub const DAYS_PER_MONTH: f64 = 30.44;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file: {0}")]
    Csv(#[from] csv::Error),
    #[error("corpus file is missing the {0:?} column")]
    MissingColumn(String),
    #[error("schema line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("a fold map is required unless output is uncorrected")]
    MissingFoldMap,
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where each record field comes from in the input CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSchema {
    pub utterance_id: String,
    pub transcript_id: String,
    pub corpus_id: String,
    pub collection_id: String,
    pub speaker_role: String,
    pub target_child_age: String,
    pub gloss: String,
    /// Speaker code marking child-produced utterances (case-sensitive).
    pub child_role: String,
    explicit: BTreeSet<&'static str>,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            utterance_id: "id".into(),
            transcript_id: "transcript_id".into(),
            corpus_id: "corpus_id".into(),
            collection_id: "collection_id".into(),
            speaker_role: "speaker_code".into(),
            target_child_age: "target_child_age".into(),
            gloss: "gloss".into(),
            child_role: "CHI".into(),
            explicit: BTreeSet::new(),
        }
    }
}

impl CorpusSchema {
    const FIELDS: [&'static str; 7] = [
        "utterance_id",
        "transcript_id",
        "corpus_id",
        "collection_id",
        "speaker_role",
        "target_child_age",
        "gloss",
    ];

    /// Reads `field=column` lines (`#` comments). Fields named here become
    /// required columns; `gloss` and `speaker_role` are always required.
    pub fn parse_mapping(text: &str) -> Result<Self, CorpusError> {
        let mut schema = CorpusSchema::default();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CorpusError::Schema {
                line: number + 1,
                message: format!("expected `field=column`, got {line:?}"),
            })?;
            schema
                .set(key.trim(), value.trim())
                .map_err(|message| CorpusError::Schema {
                    line: number + 1,
                    message,
                })?;
        }
        Ok(schema)
    }

    pub fn set(&mut self, field: &str, column: &str) -> Result<(), String> {
        if column.is_empty() {
            return Err(format!("empty column name for {field}"));
        }
        let slot = match field {
            "utterance_id" => &mut self.utterance_id,
            "transcript_id" => &mut self.transcript_id,
            "corpus_id" => &mut self.corpus_id,
            "collection_id" => &mut self.collection_id,
            "speaker_role" => &mut self.speaker_role,
            "target_child_age" => &mut self.target_child_age,
            "gloss" => &mut self.gloss,
            "child_role" => {
                self.child_role = column.to_string();
                return Ok(());
            }
            other => return Err(format!("unknown schema field {other:?}")),
        };
        *slot = column.to_string();
        let name = Self::FIELDS.iter().find(|f| **f == field).expect("field listed");
        self.explicit.insert(name);
        Ok(())
    }

    fn column_of(&self, field: &str) -> &str {
        match field {
            "utterance_id" => &self.utterance_id,
            "transcript_id" => &self.transcript_id,
            "corpus_id" => &self.corpus_id,
            "collection_id" => &self.collection_id,
            "speaker_role" => &self.speaker_role,
            "target_child_age" => &self.target_child_age,
            "gloss" => &self.gloss,
            _ => unreachable!("unknown field {field}"),
        }
    }

    fn is_required(&self, field: &str) -> bool {
        field == "gloss" || field == "speaker_role" || self.explicit.contains(field)
    }
}

/// Column layout of an input corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusHeader {
    pub columns: Vec<String>,
    /// Column index of each schema field, in `CorpusSchema::FIELDS` order.
    field_index: [Option<usize>; 7],
}

impl CorpusHeader {
    fn new(columns: Vec<String>, schema: &CorpusSchema) -> Result<Self, CorpusError> {
        let mut field_index = [None; 7];
        for (slot, field) in field_index.iter_mut().zip(CorpusSchema::FIELDS) {
            let name = schema.column_of(field);
            *slot = columns.iter().position(|c| c == name);
            if slot.is_none() && schema.is_required(field) {
                return Err(CorpusError::MissingColumn(name.to_string()));
            }
        }
        Ok(CorpusHeader { columns, field_index })
    }

    /// Output header: input columns followed by any derived column not already present.
    pub fn output_columns(&self) -> Vec<String> {
        let mut out = self.columns.clone();
        for derived in [PHONEMIZED_COLUMN, IS_CHILD_COLUMN, ERRORS_COLUMN] {
            if !out.iter().any(|c| c == derived) {
                out.push(derived.to_string());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtteranceRecord {
    /// Line of the row in the input file.
    pub line: u64,
    pub utterance_id: String,
    pub transcript_id: String,
    pub corpus_id: String,
    pub collection_id: String,
    pub speaker_role: String,
    /// Age in months, when the cell held a number or a `Y;MM.DD` age.
    pub target_child_age: Option<f64>,
    /// The age cell as it appeared in the input.
    pub target_child_age_text: String,
    pub gloss: String,
    pub phonemized: Option<String>,
    pub is_child: bool,
    pub errors: Option<String>,
    /// Unmapped columns in input order.
    pub extra: Vec<(String, String)>,
}

impl UtteranceRecord {
    fn field(&self, index: usize) -> &str {
        match index {
            0 => &self.utterance_id,
            1 => &self.transcript_id,
            2 => &self.corpus_id,
            3 => &self.collection_id,
            4 => &self.speaker_role,
            5 => &self.target_child_age_text,
            6 => &self.gloss,
            _ => unreachable!(),
        }
    }
}

/// Months from a CHILDES age `Y;MM.DD`. Months and days may be omitted
/// (`2;`, `1;06`). Anything malformed gives `None`.
pub fn parse_age(text: &str) -> Option<f64> {
    let (years, rest) = text.trim().split_once(';')?;
    let years: u32 = years.trim().parse().ok()?;
    let (months, days) = match rest.split_once('.') {
        Some((m, d)) => (m, d),
        None => (rest, ""),
    };
    let months: u32 = if months.is_empty() { 0 } else { months.parse().ok()? };
    let days: u32 = if days.is_empty() { 0 } else { days.parse().ok()? };
    Some(f64::from(years) * 12.0 + f64::from(months) + f64::from(days) / DAYS_PER_MONTH)
}

/// A plain number is already months; otherwise the cell is a CHILDES age.
fn age_in_months(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    match cell.parse::<f64>() {
        Ok(months) if months.is_finite() && months >= 0.0 => Some(months),
        Ok(_) => None,
        Err(_) => parse_age(cell),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

/// Reads records lazily. Rows that cannot be decoded are skipped and
/// counted in [`CorpusReader::skipped`].
pub struct CorpusReader<R: Read> {
    reader: csv::Reader<R>,
    header: CorpusHeader,
    child_role: String,
    skipped: Vec<RowError>,
    record: csv::StringRecord,
}

impl CorpusReader<std::fs::File> {
    pub fn from_path(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<Self, CorpusError> {
        Self::new(std::fs::File::open(path)?, schema)
    }
}

impl<R: Read> CorpusReader<R> {
    pub fn new(input: R, schema: &CorpusSchema) -> Result<Self, CorpusError> {
        let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let header = CorpusHeader::new(columns, schema)?;
        Ok(CorpusReader {
            reader,
            header,
            child_role: schema.child_role.clone(),
            skipped: Vec::new(),
            record: csv::StringRecord::new(),
        })
    }

    pub fn header(&self) -> &CorpusHeader {
        &self.header
    }

    pub fn skipped(&self) -> &[RowError] {
        &self.skipped
    }

    fn build(&self, record: &csv::StringRecord) -> UtteranceRecord {
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            self.header.field_index[i]
                .and_then(|col| record.get(col))
                .unwrap_or("")
                .to_string()
        };
        let mapped: BTreeSet<usize> = self.header.field_index.iter().flatten().copied().collect();
        let mut extra = Vec::new();
        let mut phonemized = None;
        let mut errors = None;
        for (i, name) in self.header.columns.iter().enumerate() {
            let cell = record.get(i).unwrap_or("");
            match name.as_str() {
                PHONEMIZED_COLUMN if !mapped.contains(&i) => {
                    phonemized = Some(cell.to_string()).filter(|c| !c.is_empty());
                }
                ERRORS_COLUMN if !mapped.contains(&i) => {
                    errors = Some(cell.to_string()).filter(|c| !c.is_empty());
                }
                IS_CHILD_COLUMN if !mapped.contains(&i) => {}
                _ if !mapped.contains(&i) => extra.push((name.clone(), cell.to_string())),
                _ => {}
            }
        }
        let speaker_role = field(4);
        let age_text = field(5);
        UtteranceRecord {
            line,
            utterance_id: field(0),
            transcript_id: field(1),
            corpus_id: field(2),
            collection_id: field(3),
            is_child: speaker_role == self.child_role,
            speaker_role,
            target_child_age: age_in_months(&age_text),
            target_child_age_text: age_text,
            gloss: field(6),
            phonemized,
            errors,
            extra,
        }
    }
}

impl<R: Read> Iterator for CorpusReader<R> {
    type Item = UtteranceRecord;

    fn next(&mut self) -> Option<UtteranceRecord> {
        loop {
            let mut record = std::mem::take(&mut self.record);
            let result = self.reader.read_record(&mut record);
            let out = match result {
                Ok(false) => None,
                Ok(true) => Some(Ok(self.build(&record))),
                Err(err) => {
                    let line = err.position().map_or(0, |p| p.line());
                    Some(Err(RowError {
                        line,
                        message: err.to_string(),
                    }))
                }
            };
            self.record = record;
            match out {
                None => return None,
                Some(Ok(rec)) => return Some(rec),
                Some(Err(row)) => self.skipped.push(row),
            }
        }
    }
}

/// Everything read from one corpus file.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub header: CorpusHeader,
    pub records: Vec<UtteranceRecord>,
    pub skipped: Vec<RowError>,
}

pub fn read_corpus<R: Read>(input: R, schema: &CorpusSchema) -> Result<Corpus, CorpusError> {
    let mut reader = CorpusReader::new(input, schema)?;
    let records: Vec<UtteranceRecord> = reader.by_ref().collect();
    Ok(Corpus {
        header: reader.header.clone(),
        records,
        skipped: reader.skipped,
    })
}

pub fn read_corpus_path(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<Corpus, CorpusError> {
    read_corpus(std::fs::File::open(path)?, schema)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvertOptions {
    pub keep_word_boundaries: bool,
    /// Skip folding and keep backend output as produced.
    pub uncorrected: bool,
    /// Size of the conversion pool; `0` uses rayon's default.
    pub workers: usize,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            keep_word_boundaries: false,
            uncorrected: false,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub rows: usize,
    pub converted: usize,
    pub failed: usize,
    pub skipped_rows: usize,
    pub observed: BTreeSet<IpaSegment>,
    pub unmapped: BTreeMap<char, u64>,
}

impl CorpusSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

struct RowOutcome {
    observed: BTreeSet<IpaSegment>,
    unmapped: UnmappedReport,
    failed: bool,
}

/// Converts every record's gloss, folding unless `uncorrected`. Failed rows
/// keep an empty `phonemized` and a message in `errors`. Output order is
/// input order for any worker count.
pub fn convert_corpus(
    records: &mut [UtteranceRecord],
    backend: &Backend,
    fold_map: Option<&FoldMap>,
    options: ConvertOptions,
) -> Result<CorpusSummary, CorpusError> {
    let fold_map = match (fold_map, options.uncorrected) {
        (_, true) => None,
        (Some(map), false) => Some(map),
        (None, false) => return Err(CorpusError::MissingFoldMap),
    };

    let convert_one = |record: &mut UtteranceRecord| -> RowOutcome {
        match backend.convert_utterance(&record.gloss, options.keep_word_boundaries) {
            Ok(conversion) => {
                let stream = match fold_map {
                    Some(map) => map.apply(&conversion.stream),
                    None => conversion.stream,
                };
                record.phonemized = Some(stream.emit(options.keep_word_boundaries));
                record.errors = None;
                RowOutcome {
                    observed: stream.segment_types(),
                    unmapped: conversion.unmapped,
                    failed: false,
                }
            }
            Err(err) => {
                record.phonemized = None;
                record.errors = Some(err.to_string());
                RowOutcome {
                    observed: BTreeSet::new(),
                    unmapped: UnmappedReport::default(),
                    failed: true,
                }
            }
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| CorpusError::Pool(e.to_string()))?;
    let outcomes: Vec<RowOutcome> = pool.install(|| records.par_iter_mut().map(convert_one).collect());

    let mut summary = CorpusSummary {
        rows: records.len(),
        ..CorpusSummary::default()
    };
    let mut unmapped = UnmappedReport::default();
    for outcome in outcomes {
        if outcome.failed {
            summary.failed += 1;
        } else {
            summary.converted += 1;
        }
        summary.observed.extend(outcome.observed);
        unmapped.merge(&outcome.unmapped);
    }
    summary.unmapped = unmapped.counts;
    Ok(summary)
}

/// Stable sort by age; rows without an age go last.
pub fn sort_by_age(records: &mut [UtteranceRecord]) {
    records.sort_by(|a, b| match (a.target_child_age, b.target_child_age) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
}

/// Writes the input columns (with field values taken from the records) and
/// the derived columns, quoting as needed.
pub fn write_corpus<W: Write>(
    records: &[UtteranceRecord],
    header: &CorpusHeader,
    output: W,
) -> Result<(), CorpusError> {
    let mut writer = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(output);
    let columns = header.output_columns();
    writer.write_record(&columns)?;

    let field_of_column: Vec<Option<usize>> = columns
        .iter()
        .enumerate()
        .map(|(col, _)| header.field_index.iter().position(|f| *f == Some(col)))
        .collect();
    let mut row: Vec<&str> = Vec::with_capacity(columns.len());
    for record in records {
        row.clear();
        let mut extra = record.extra.iter();
        for (col, name) in columns.iter().enumerate() {
            let cell = if let Some(field) = field_of_column[col] {
                record.field(field)
            } else {
                match name.as_str() {
                    PHONEMIZED_COLUMN => record.phonemized.as_deref().unwrap_or(""),
                    IS_CHILD_COLUMN => {
                        if record.is_child {
                            "true"
                        } else {
                            "false"
                        }
                    }
                    ERRORS_COLUMN => record.errors.as_deref().unwrap_or(""),
                    _ => extra.next().map_or("", |(_, v)| v.as_str()),
                }
            };
            row.push(cell);
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
