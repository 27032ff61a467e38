//! File loading and shared evaluation plumbing for the CLI commands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fairbench_core::{
    fairness_report, group_success_profile, load_manifest, parse_classification_log,
    parse_landmark_log, BenchmarkManifest, ClassificationRecord, GroupProfile, IngestError,
    LandmarkRecord, ParseReport, PerformancePoint, Split, SuccessProfile, TaskKind,
};

use crate::CliError;

/// Reads and validates the manifest; run paths resolve relative to its
/// parent directory.
pub(crate) fn read_manifest(path: &Path) -> Result<(BenchmarkManifest, PathBuf), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read manifest {}: {e}", path.display())))?;
    let manifest = load_manifest(&text).map_err(|e| manifest_error(path, e))?;
    let base_dir = match path.parent() {
        Some(parent) if parent != Path::new("") => parent.to_path_buf(),
        _ => PathBuf::from("."),
    };
    Ok((manifest, base_dir))
}

fn manifest_error(path: &Path, err: IngestError) -> CliError {
    match err {
        IngestError::InvalidManifest(violations) => {
            let mut message = format!("manifest {} is invalid:", path.display());
            for violation in violations {
                message.push_str(&format!("\n  - {violation}"));
            }
            CliError::input(message)
        }
        other => CliError::input(format!("manifest {}: {other}", path.display())),
    }
}

/// Applies a `--threshold` override to whichever threshold the task uses.
pub(crate) fn apply_threshold(
    manifest: &mut BenchmarkManifest,
    threshold: Option<f64>,
) -> Result<(), CliError> {
    let Some(value) = threshold else { return Ok(()) };
    if !value.is_finite() || value <= 0.0 || value >= 1.0 {
        return Err(CliError::input(format!(
            "--threshold must lie strictly between 0 and 1, got {value}"
        )));
    }
    match manifest.task_kind {
        TaskKind::Classification => manifest.score_threshold = value,
        TaskKind::Landmark => manifest.sdr_threshold = value,
    }
    Ok(())
}

fn parse_warnings(path: &Path, report: &ParseReport) -> Vec<String> {
    if report.records_rejected == 0 {
        return Vec::new();
    }
    let total = report.records_parsed + report.records_rejected;
    let mut warnings = vec![format!(
        "{}: rejected {} of {} rows",
        path.display(),
        report.records_rejected,
        total
    )];
    for (line, reason) in &report.first_errors {
        warnings.push(format!("{}: line {line}: {reason}", path.display()));
    }
    warnings
}

pub(crate) fn read_classification_log(
    path: &Path,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<ClassificationRecord>, Vec<String>), CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot read log {}: {e}", path.display())))?;
    let (records, report) = parse_classification_log(file, manifest)
        .map_err(|e| CliError::input(format!("log {}: {e}", path.display())))?;
    Ok((records, parse_warnings(path, &report)))
}

pub(crate) fn read_landmark_log(
    path: &Path,
    manifest: &BenchmarkManifest,
) -> Result<(Vec<LandmarkRecord>, Vec<String>), CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot read log {}: {e}", path.display())))?;
    let (records, report) = parse_landmark_log(file, manifest)
        .map_err(|e| CliError::input(format!("log {}: {e}", path.display())))?;
    Ok((records, parse_warnings(path, &report)))
}

/// Profiles a classification log, one profile per task id.
pub(crate) fn classification_profiles(
    records: Vec<ClassificationRecord>,
    manifest: &BenchmarkManifest,
    path: &Path,
    test_only: bool,
) -> Result<BTreeMap<String, GroupProfile>, CliError> {
    let records: Vec<ClassificationRecord> = if test_only {
        records.into_iter().filter(|r| r.split == Split::Test).collect()
    } else {
        records
    };
    if records.is_empty() {
        return Err(CliError::input(format!(
            "log {} has no {}records to evaluate",
            path.display(),
            if test_only { "test-split " } else { "" }
        )));
    }
    let mut by_task: BTreeMap<String, Vec<ClassificationRecord>> = BTreeMap::new();
    for record in records {
        by_task.entry(record.task_id.clone()).or_default().push(record);
    }
    by_task
        .into_iter()
        .map(|(task, task_records)| match fairness_report(&task_records, manifest) {
            Ok(profile) => Ok((task, profile)),
            Err(e) => Err(CliError::input(format!(
                "log {}, task '{task}': {e}",
                path.display()
            ))),
        })
        .collect()
}

/// Profiles a landmark log at one success threshold.
pub(crate) fn landmark_profile(
    records: Vec<LandmarkRecord>,
    manifest: &BenchmarkManifest,
    path: &Path,
    test_only: bool,
) -> Result<SuccessProfile, CliError> {
    let records: Vec<LandmarkRecord> = if test_only {
        records.into_iter().filter(|r| r.split == Split::Test).collect()
    } else {
        records
    };
    if records.is_empty() {
        return Err(CliError::input(format!(
            "log {} has no {}records to evaluate",
            path.display(),
            if test_only { "test-split " } else { "" }
        )));
    }
    group_success_profile(&records, manifest.sdr_threshold, &manifest.normalization)
        .map_err(|e| CliError::input(format!("log {}: {e}", path.display())))
}

/// One evaluated (method, run) cell of the benchmark grid.
pub(crate) enum CellValue {
    Classification(BTreeMap<String, GroupProfile>),
    Landmark(SuccessProfile),
}

/// Loads and profiles one run log; used from the parallel rank stage, so
/// warnings are returned rather than printed.
pub(crate) fn evaluate_cell(
    path: &Path,
    manifest: &BenchmarkManifest,
) -> Result<(CellValue, Vec<String>), CliError> {
    match manifest.task_kind {
        TaskKind::Classification => {
            let (records, warnings) = read_classification_log(path, manifest)?;
            let profiles = classification_profiles(records, manifest, path, true)?;
            Ok((CellValue::Classification(profiles), warnings))
        }
        TaskKind::Landmark => {
            let (records, warnings) = read_landmark_log(path, manifest)?;
            let profile = landmark_profile(records, manifest, path, true)?;
            Ok((CellValue::Landmark(profile), warnings))
        }
    }
}

/// Parses a `start:stop:step` grid spec into explicit thresholds. The
/// values are built as `start + i*step` so the grid is strictly ascending.
pub(crate) fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::input(format!(
            "--grid must look like start:stop:step, got '{text}'"
        )));
    };
    let parse = |field: &str, raw: &str| -> Result<f64, CliError> {
        raw.parse::<f64>()
            .map_err(|_| CliError::input(format!("--grid {field} '{raw}' is not a number")))
    };
    let (start, stop, step) = (parse("start", start)?, parse("stop", stop)?, parse("step", step)?);
    if ![start, stop, step].iter().all(|v| v.is_finite()) || step <= 0.0 || start > stop {
        return Err(CliError::input(format!(
            "--grid needs finite start <= stop and step > 0, got '{text}'"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub(crate) fn write_out(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Wraps a (min, max) pair that earlier stages guaranteed feasible.
pub(crate) fn feasible_point(min_group: f64, max_group: f64) -> Result<PerformancePoint, CliError> {
    PerformancePoint::new(min_group, max_group)
        .map_err(|e| CliError::internal(format!("evaluation produced an infeasible point: {e}")))
}
