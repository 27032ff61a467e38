//! Parses prediction logs and the benchmark manifest.
//!
//! Classification logs are CSV (header required, column order free) or
//! JSONL; landmark logs are JSONL because their rows nest coordinate
//! arrays. Bad rows are rejected and counted, never silently dropped: a
//! fairness audit that quietly loses minority-group rows would defeat its
//! own purpose. Structural defects (missing columns, inconsistent landmark
//! counts, zero valid rows) fail the whole parse instead.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::Read;

use crate::model::{
    validate_manifest, BenchmarkManifest, ClassificationRecord, LandmarkRecord, ManifestError,
    Split,
};

/// How many rejected rows keep their (line, reason) detail.
const MAX_RECORDED_ERRORS: usize = 20;

/// Outcome accounting for one parsed log. `records_parsed` plus
/// `records_rejected` equals the number of data lines seen.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ParseReport {
    pub records_parsed: usize,
    pub records_rejected: usize,
    /// (line number, reason) for the first rejected rows, capped at 20.
    pub first_errors: Vec<(u64, String)>,
}

impl ParseReport {
    fn reject(&mut self, line: u64, reason: impl Into<String>) {
        self.records_rejected += 1;
        if self.first_errors.len() < MAX_RECORDED_ERRORS {
            self.first_errors.push((line, reason.into()));
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("failed to read log: {0}")]
    Io(#[from] std::io::Error),
    #[error("{message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("manifest failed validation with {} problem(s)", .0.len())]
    InvalidManifest(Vec<ManifestError>),
    #[error("log is missing required column '{0}'")]
    MissingColumn(String),
    #[error("log contains no valid records ({} rows rejected)", report.records_rejected)]
    EmptyLog { report: ParseReport },
    #[error("line {line}: expected {expected} landmarks per record, found {pred} predicted / {gt} ground-truth")]
    KMismatch { line: u64, expected: usize, pred: usize, gt: usize },
}

/// Parses and validates a manifest from JSON text.
pub fn load_manifest(text: &str) -> Result<BenchmarkManifest, IngestError> {
    let manifest: BenchmarkManifest =
        serde_json::from_str(text).map_err(|e| IngestError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    validate_manifest(manifest).map_err(IngestError::InvalidManifest)
}

/// One classification row before semantic validation, shared by the CSV
/// and JSONL paths.
#[derive(Debug, Deserialize)]
struct ClassRow {
    sample_id: String,
    y_true: u8,
    #[serde(default)]
    y_pred: Option<u8>,
    #[serde(default)]
    score: Option<f64>,
    group: String,
    run_id: String,
    task_id: String,
    split: Split,
    #[serde(default)]
    checkpoint: Option<u64>,
}

type ClassKey = (String, String, String, Split, Option<u64>);

fn finish_classification(
    row: ClassRow,
    manifest: &BenchmarkManifest,
    seen: &mut BTreeSet<ClassKey>,
) -> Result<ClassificationRecord, String> {
    if row.y_true > 1 {
        return Err(format!("y_true must be 0 or 1, got {}", row.y_true));
    }
    if let Some(score) = row.score {
        if !score.is_finite() || !(0.0..=1.0).contains(&score) {
            return Err(format!("score {score} not in [0, 1]"));
        }
    }
    let y_pred = match row.y_pred {
        Some(p) if p <= 1 => p,
        Some(p) => return Err(format!("y_pred must be 0 or 1, got {p}")),
        // Ties go to the positive class: score >= threshold reads positive.
        None => match row.score {
            Some(score) if score >= manifest.score_threshold => manifest.positive_label,
            Some(_) => 1 - manifest.positive_label,
            None => return Err("row provides neither y_pred nor score".into()),
        },
    };
    if !manifest.group_labels.contains(&row.group) {
        return Err(format!("unknown group '{}'", row.group));
    }
    let key = (
        row.sample_id.clone(),
        row.run_id.clone(),
        row.task_id.clone(),
        row.split,
        row.checkpoint,
    );
    if !seen.insert(key) {
        return Err(format!(
            "duplicate sample_id '{}' within its (run, task, split, checkpoint) cell",
            row.sample_id
        ));
    }
    Ok(ClassificationRecord {
        sample_id: row.sample_id,
        y_true: row.y_true,
        y_pred,
        score: row.score,
        group: row.group,
        run_id: row.run_id,
        task_id: row.task_id,
        split: row.split,
        checkpoint: row.checkpoint,
    })
}

struct ClassColumns {
    sample_id: usize,
    y_true: usize,
    y_pred: Option<usize>,
    score: Option<usize>,
    group: usize,
    run_id: usize,
    task_id: usize,
    split: usize,
    checkpoint: Option<usize>,
}

impl ClassColumns {
    fn resolve(headers: &csv::StringRecord) -> Result<Self, IngestError> {
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);
        let require = |name: &str| {
            find(name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))
        };
        let y_pred = find("y_pred");
        let score = find("score");
        if y_pred.is_none() && score.is_none() {
            return Err(IngestError::MissingColumn("y_pred (or score)".into()));
        }
        Ok(ClassColumns {
            sample_id: require("sample_id")?,
            y_true: require("y_true")?,
            y_pred,
            score,
            group: require("group")?,
            run_id: require("run_id")?,
            task_id: require("task_id")?,
            split: require("split")?,
            checkpoint: find("checkpoint"),
        })
    }
}

fn csv_row_to_class(record: &csv::StringRecord, cols: &ClassColumns) -> Result<ClassRow, String> {
    let field = |idx: usize, name: &str| -> Result<&str, String> {
        record
            .get(idx)
            .map(str::trim)
            .ok_or_else(|| format!("missing field '{name}'"))
    };
    let optional = |idx: Option<usize>| {
        idx.and_then(|i| record.get(i)).map(str::trim).filter(|s| !s.is_empty())
    };

    let raw_y_true = field(cols.y_true, "y_true")?;
    let y_true: u8 = raw_y_true
        .parse()
        .map_err(|_| format!("y_true '{raw_y_true}' is not an integer"))?;
    let y_pred = match optional(cols.y_pred) {
        Some(s) => Some(s.parse::<u8>().map_err(|_| format!("y_pred '{s}' is not an integer"))?),
        None => None,
    };
    let score = match optional(cols.score) {
        Some(s) => Some(s.parse::<f64>().map_err(|_| format!("score '{s}' is not a number"))?),
        None => None,
    };
    let checkpoint = match optional(cols.checkpoint) {
        Some(s) => Some(s.parse::<u64>().map_err(|_| format!("checkpoint '{s}' is not an integer"))?),
        None => None,
    };
    Ok(ClassRow {
        sample_id: field(cols.sample_id, "sample_id")?.to_string(),
        y_true,
        y_pred,
        score,
        group: field(cols.group, "group")?.to_string(),
        run_id: field(cols.run_id, "run_id")?.to_string(),
        task_id: field(cols.task_id, "task_id")?.to_string(),
        split: field(cols.split, "split")?.parse::<Split>()?,
        checkpoint,
    })
}

fn parse_classification_csv(
    text: &str,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<ClassificationRecord>, ParseReport), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IngestError::Syntax {
        line: 1,
        column: 0,
        message: e.to_string(),
    })?;
    let cols = ClassColumns::resolve(headers)?;

    let mut records = Vec::new();
    let mut report = ParseReport::default();
    let mut seen = BTreeSet::new();
    let mut fallback_line = 1u64;
    for item in reader.records() {
        fallback_line += 1;
        match item {
            Ok(record) => {
                let line = record.position().map_or(fallback_line, |p| p.line());
                match csv_row_to_class(&record, &cols)
                    .and_then(|row| finish_classification(row, manifest, &mut seen))
                {
                    Ok(rec) => {
                        records.push(rec);
                        report.records_parsed += 1;
                    }
                    Err(reason) => report.reject(line, reason),
                }
            }
            Err(e) => {
                let line = e.position().map_or(fallback_line, |p| p.line());
                report.reject(line, format!("malformed line: {e}"));
            }
        }
    }
    if records.is_empty() {
        return Err(IngestError::EmptyLog { report });
    }
    Ok((records, report))
}

fn parse_classification_jsonl(
    text: &str,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<ClassificationRecord>, ParseReport), IngestError> {
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = (i + 1) as u64;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parsed: Result<ClassRow, _> = serde_json::from_str(trimmed);
        match parsed {
            Ok(row) => match finish_classification(row, manifest, &mut seen) {
                Ok(rec) => {
                    records.push(rec);
                    report.records_parsed += 1;
                }
                Err(reason) => report.reject(line_no, reason),
            },
            Err(e) => report.reject(line_no, format!("malformed line: {e}")),
        }
    }
    if records.is_empty() {
        return Err(IngestError::EmptyLog { report });
    }
    Ok((records, report))
}

/// Parses a classification log, auto-detecting CSV vs JSONL from the first
/// non-blank character. The whole stream is read up front, so results do
/// not depend on chunk boundaries.
pub fn parse_classification_log<R: Read>(
    mut source: R,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<ClassificationRecord>, ParseReport), IngestError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    if text.trim_start().starts_with('{') {
        parse_classification_jsonl(&text, manifest)
    } else {
        parse_classification_csv(&text, manifest)
    }
}

/// Parses a JSONL landmark log. The landmark count K is pinned by the
/// first line whose pred/gt lengths agree; any later deviation aborts the
/// parse, because mixed-K logs cannot be compared meaningfully.
pub fn parse_landmark_log<R: Read>(
    mut source: R,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<LandmarkRecord>, ParseReport), IngestError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut records = Vec::new();
    let mut report = ParseReport::default();
    let mut seen: BTreeSet<(String, String, Split, Option<u64>)> = BTreeSet::new();
    let mut established_k: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = (i + 1) as u64;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let rec: LandmarkRecord = match serde_json::from_str(trimmed) {
            Ok(rec) => rec,
            Err(e) => {
                report.reject(line_no, format!("malformed line: {e}"));
                continue;
            }
        };

        let (pred, gt) = (rec.pred.len(), rec.gt.len());
        if pred != gt || gt == 0 {
            return Err(IngestError::KMismatch {
                line: line_no,
                expected: established_k.unwrap_or(gt.max(1)),
                pred,
                gt,
            });
        }
        match established_k {
            None => established_k = Some(gt),
            Some(k) if k != gt => {
                return Err(IngestError::KMismatch { line: line_no, expected: k, pred, gt })
            }
            Some(_) => {}
        }

        if rec.pred.iter().chain(&rec.gt).any(|p| !p.is_finite()) {
            report.reject(line_no, "non-finite coordinate");
            continue;
        }
        if let Some(norm) = rec.norm {
            if !norm.is_finite() || norm <= 0.0 {
                report.reject(line_no, format!("norm {norm} is not a positive number"));
                continue;
            }
        }
        if !manifest.group_labels.contains(&rec.group) {
            report.reject(line_no, format!("unknown group '{}'", rec.group));
            continue;
        }
        let key = (rec.sample_id.clone(), rec.run_id.clone(), rec.split, rec.checkpoint);
        if !seen.insert(key) {
            report.reject(
                line_no,
                format!(
                    "duplicate sample_id '{}' within its (run, split, checkpoint) cell",
                    rec.sample_id
                ),
            );
            continue;
        }
        records.push(rec);
        report.records_parsed += 1;
    }
    if records.is_empty() {
        return Err(IngestError::EmptyLog { report });
    }
    Ok((records, report))
}

/// Serializes records to the canonical CSV layout. Parsing the result
/// reproduces the records exactly (floats print in shortest round-trip
/// form).
pub fn classification_to_csv(records: &[ClassificationRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "sample_id",
            "y_true",
            "y_pred",
            "score",
            "group",
            "run_id",
            "task_id",
            "split",
            "checkpoint",
        ])
        .expect("in-memory write");
    for rec in records {
        writer
            .write_record(&[
                rec.sample_id.clone(),
                rec.y_true.to_string(),
                rec.y_pred.to_string(),
                rec.score.map(|s| s.to_string()).unwrap_or_default(),
                rec.group.clone(),
                rec.run_id.clone(),
                rec.task_id.clone(),
                rec.split.to_string(),
                rec.checkpoint.map(|c| c.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Serializes landmark records to canonical JSONL, one record per line.
pub fn landmark_to_jsonl(records: &[LandmarkRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        out.push_str(&serde_json::to_string(rec).expect("landmark records serialize"));
        out.push('\n');
    }
    out
}
