//! Aggregation over runs and tasks, validation-based checkpoint selection,
//! and method ranking.
//!
//! Metrics travel as flat `name -> value` maps so that classification and
//! landmark runs share one aggregation path. `max_group` / `min_group` hold
//! the best- and worst-group percentages for either task kind; they render
//! as MGA/mGA or MGS/mGS depending on which task produced them.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::classify::GroupProfile;
use crate::landmark::SuccessProfile;
use crate::model::{Split, TaskKind};
use crate::relative::ComparisonResult;

/// Canonical metric names used in report maps.
pub mod keys {
    pub const ACC: &str = "acc";
    pub const SDR: &str = "sdr";
    pub const MAX_GROUP: &str = "max_group";
    pub const MIN_GROUP: &str = "min_group";
    pub const DA: &str = "da";
    pub const DS: &str = "ds";
    pub const DEO: &str = "deo";
    pub const DEODDS: &str = "deodds";
    pub const HF: &str = "hf";
    pub const SIGMA_HF: &str = "sigma_hf";
    pub const DELTA_DTO: &str = "delta_dto";
}

/// Ranking/marking direction for a metric, `None` for unknown names.
pub fn higher_is_better(key: &str) -> Option<bool> {
    match key {
        keys::ACC | keys::SDR | keys::MAX_GROUP | keys::MIN_GROUP | keys::HF
        | keys::SIGMA_HF | keys::DELTA_DTO => Some(true),
        keys::DA | keys::DS | keys::DEO | keys::DEODDS => Some(false),
        _ => None,
    }
}

/// Column order used by ranked tables; gap metrics last, topped off by the
/// two baseline-relative scores.
const COLUMN_ORDER: [&str; 10] = [
    keys::ACC,
    keys::SDR,
    keys::MAX_GROUP,
    keys::MIN_GROUP,
    keys::DA,
    keys::DS,
    keys::DEO,
    keys::DEODDS,
    keys::DELTA_DTO,
    keys::SIGMA_HF,
];

/// Metrics of a single run of one method on one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub method_id: String,
    pub task_id: String,
    pub run_id: String,
    pub values: BTreeMap<String, f64>,
}

impl RunReport {
    /// Flattens a classification profile, plus the per-run baseline
    /// comparison when one exists (σ(HF) is meant to be averaged over runs,
    /// so it has to be attached at run level).
    pub fn from_classification(
        method_id: &str,
        task_id: &str,
        run_id: &str,
        profile: &GroupProfile,
        comparison: Option<&ComparisonResult>,
    ) -> Self {
        let mut values = BTreeMap::new();
        values.insert(keys::ACC.into(), profile.accuracy);
        values.insert(keys::MAX_GROUP.into(), profile.max_group.percent);
        values.insert(keys::MIN_GROUP.into(), profile.min_group.percent);
        values.insert(keys::DA.into(), profile.da);
        values.insert(keys::DEO.into(), profile.deo);
        values.insert(keys::DEODDS.into(), profile.deodds);
        if let Some(cmp) = comparison {
            values.insert(keys::HF.into(), cmp.hf);
            values.insert(keys::SIGMA_HF.into(), cmp.sigma_hf);
        }
        RunReport {
            method_id: method_id.into(),
            task_id: task_id.into(),
            run_id: run_id.into(),
            values,
        }
    }

    /// Flattens a landmark success profile the same way.
    pub fn from_landmark(
        method_id: &str,
        task_id: &str,
        run_id: &str,
        profile: &SuccessProfile,
        comparison: Option<&ComparisonResult>,
    ) -> Self {
        let mut values = BTreeMap::new();
        values.insert(keys::SDR.into(), profile.sdr_overall);
        values.insert(keys::MAX_GROUP.into(), profile.max_group.percent);
        values.insert(keys::MIN_GROUP.into(), profile.min_group.percent);
        values.insert(keys::DS.into(), profile.ds);
        if let Some(cmp) = comparison {
            values.insert(keys::HF.into(), cmp.hf);
            values.insert(keys::SIGMA_HF.into(), cmp.sigma_hf);
        }
        RunReport {
            method_id: method_id.into(),
            task_id: task_id.into(),
            run_id: run_id.into(),
            values,
        }
    }
}

/// Mean and sample standard deviation of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n >= 2 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    MetricSummary { mean, std }
}

/// Run-averaged metrics of one method on one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub method_id: String,
    pub task_id: String,
    pub n_runs: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
    /// Raw per-run values in run_id order, kept so task averaging can pool
    /// them. Empty for aggregates built by hand.
    pub per_run: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AggregateError {
    #[error("no reports to aggregate")]
    EmptyInput,
    #[error("reports mix identities: expected {expected}, found {found}")]
    IdentityMismatch { expected: String, found: String },
    #[error("run '{0}' appears more than once")]
    DuplicateRun(String),
    #[error("'{id}' does not carry the same metrics as its siblings")]
    MismatchedKeys { id: String },
    #[error("task '{0}' appears more than once")]
    DuplicateTask(String),
    #[error("no validation history to select from")]
    EmptyHistory,
    #[error("checkpoint {checkpoint} was evaluated on the {split} split, not val")]
    WrongSplit { checkpoint: u64, split: Split },
    #[error("comparison for '{0}' was not made against the shared baseline")]
    MixedBaselines(String),
    #[error("unknown ranking key '{0}'")]
    UnknownKey(String),
    #[error("'{id}' lacks the '{key}' metric")]
    MissingMetric { id: String, key: String },
}

/// Averages per-run reports of one (method, task) cell. Reports are reduced
/// in sorted run_id order, so the result is permutation-invariant.
pub fn aggregate_runs(reports: &[RunReport]) -> Result<AggregateReport, AggregateError> {
    let first = reports.first().ok_or(AggregateError::EmptyInput)?;
    let mut sorted: Vec<&RunReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.run_id.cmp(&b.run_id));

    let expected = format!("{}/{}", first.method_id, first.task_id);
    for pair in sorted.windows(2) {
        if pair[0].run_id == pair[1].run_id {
            return Err(AggregateError::DuplicateRun(pair[0].run_id.clone()));
        }
    }
    for report in &sorted {
        let found = format!("{}/{}", report.method_id, report.task_id);
        if found != expected {
            return Err(AggregateError::IdentityMismatch { expected, found });
        }
        if !report.values.keys().eq(first.values.keys()) {
            return Err(AggregateError::MismatchedKeys { id: report.run_id.clone() });
        }
    }

    let mut metrics = BTreeMap::new();
    let mut per_run = BTreeMap::new();
    for key in first.values.keys() {
        let values: Vec<f64> = sorted.iter().map(|r| r.values[key]).collect();
        metrics.insert(key.clone(), summarize(&values));
        per_run.insert(key.clone(), values);
    }
    Ok(AggregateReport {
        method_id: first.method_id.clone(),
        task_id: first.task_id.clone(),
        n_runs: sorted.len(),
        metrics,
        per_run,
    })
}

/// How `average_tasks` forms the cross-task mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaskMeanMode {
    /// Unweighted mean of the per-task means; every task counts equally
    /// regardless of how many runs it has.
    #[default]
    TaskMeans,
    /// Mean over all pooled (task, run) values. Differs from `TaskMeans`
    /// only when tasks have unequal run counts. Requires retained per-run
    /// values.
    PooledRuns,
}

/// Averages per-task aggregates of one method into a single summary row.
/// The std is the sample std of the pooled per-(task, run) values when all
/// inputs retain them; otherwise it falls back to the mean of the per-task
/// stds.
pub fn average_tasks(aggregates: &[AggregateReport]) -> Result<AggregateReport, AggregateError> {
    average_tasks_with(aggregates, TaskMeanMode::TaskMeans)
}

pub fn average_tasks_with(
    aggregates: &[AggregateReport],
    mode: TaskMeanMode,
) -> Result<AggregateReport, AggregateError> {
    let first = aggregates.first().ok_or(AggregateError::EmptyInput)?;
    if aggregates.len() == 1 {
        return Ok(first.clone());
    }

    let mut sorted: Vec<&AggregateReport> = aggregates.iter().collect();
    sorted.sort_by(|a, b| a.task_id.cmp(&b.task_id));
    for pair in sorted.windows(2) {
        if pair[0].task_id == pair[1].task_id {
            return Err(AggregateError::DuplicateTask(pair[0].task_id.clone()));
        }
    }
    for agg in &sorted {
        if agg.method_id != first.method_id {
            return Err(AggregateError::IdentityMismatch {
                expected: first.method_id.clone(),
                found: agg.method_id.clone(),
            });
        }
        if !agg.metrics.keys().eq(first.metrics.keys()) {
            return Err(AggregateError::MismatchedKeys { id: agg.task_id.clone() });
        }
    }

    let can_pool = sorted
        .iter()
        .all(|a| a.metrics.keys().all(|k| !a.per_run.get(k).is_none_or(Vec::is_empty)));
    if mode == TaskMeanMode::PooledRuns && !can_pool {
        return Err(AggregateError::MissingMetric {
            id: first.method_id.clone(),
            key: "per-run values required for pooled averaging".into(),
        });
    }

    let mut metrics = BTreeMap::new();
    let mut per_run = BTreeMap::new();
    for key in first.metrics.keys() {
        let pooled: Option<Vec<f64>> = if can_pool {
            Some(sorted.iter().flat_map(|a| a.per_run[key].iter().copied()).collect())
        } else {
            None
        };
        let task_means: Vec<f64> = sorted.iter().map(|a| a.metrics[key].mean).collect();
        let mean = match (mode, &pooled) {
            (TaskMeanMode::PooledRuns, Some(values)) => {
                values.iter().sum::<f64>() / values.len() as f64
            }
            _ => task_means.iter().sum::<f64>() / task_means.len() as f64,
        };
        let std = match &pooled {
            Some(values) => summarize(values).std,
            None => {
                sorted.iter().map(|a| a.metrics[key].std).sum::<f64>() / sorted.len() as f64
            }
        };
        metrics.insert(key.clone(), MetricSummary { mean, std });
        if let Some(values) = pooled {
            per_run.insert(key.clone(), values);
        }
    }

    Ok(AggregateReport {
        method_id: first.method_id.clone(),
        task_id: format!("mean-of-{}-tasks", sorted.len()),
        n_runs: sorted.iter().map(|a| a.n_runs).sum(),
        metrics,
        per_run,
    })
}

/// One validation measurement: the worst-group score (mGA or mGS) at a
/// training checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckpointEntry {
    pub checkpoint: u64,
    pub split: Split,
    pub min_group_value: f64,
}

impl CheckpointEntry {
    pub fn from_classification(checkpoint: u64, split: Split, profile: &GroupProfile) -> Self {
        CheckpointEntry { checkpoint, split, min_group_value: profile.min_group.percent }
    }

    pub fn from_landmark(checkpoint: u64, split: Split, profile: &SuccessProfile) -> Self {
        CheckpointEntry { checkpoint, split, min_group_value: profile.min_group.percent }
    }
}

/// Picks the checkpoint with the best worst-group validation score. Ties
/// go to the earliest checkpoint.
pub fn select_checkpoint(history: &[CheckpointEntry]) -> Result<u64, AggregateError> {
    if history.is_empty() {
        return Err(AggregateError::EmptyHistory);
    }
    if let Some(bad) = history.iter().find(|e| e.split != Split::Val) {
        return Err(AggregateError::WrongSplit {
            checkpoint: bad.checkpoint,
            split: bad.split,
        });
    }
    let mut best = history[0];
    for entry in &history[1..] {
        let better = entry.min_group_value > best.min_group_value
            || (entry.min_group_value == best.min_group_value
                && entry.checkpoint < best.checkpoint);
        if better {
            best = *entry;
        }
    }
    Ok(best.checkpoint)
}

/// One rendered-table row: a method and its per-column summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRow {
    pub method_id: String,
    pub cells: BTreeMap<String, MetricSummary>,
}

/// Methods sorted by a ranking key, with direction-aware best/second-best
/// marks per column. The baseline row sits apart and is never marked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedTable {
    pub kind: TaskKind,
    pub key: String,
    pub columns: Vec<String>,
    pub baseline: RankedRow,
    pub rows: Vec<RankedRow>,
    /// Column -> index into `rows`.
    pub best: BTreeMap<String, usize>,
    pub second_best: BTreeMap<String, usize>,
}

fn row_from_aggregate(agg: &AggregateReport, delta_dto: f64) -> RankedRow {
    let mut cells: BTreeMap<String, MetricSummary> =
        agg.metrics.iter().map(|(k, v)| (k.clone(), *v)).collect();
    cells.insert(keys::DELTA_DTO.into(), MetricSummary { mean: delta_dto, std: 0.0 });
    RankedRow { method_id: agg.method_id.clone(), cells }
}

/// Ranks methods against the shared baseline by `key` (best first). Each
/// method arrives with its post-aggregation comparison; a comparison whose
/// baseline distance disagrees with the baseline aggregate is rejected as
/// coming from some other baseline.
pub fn rank_methods(
    baseline: &AggregateReport,
    methods: &[(AggregateReport, ComparisonResult)],
    key: &str,
) -> Result<RankedTable, AggregateError> {
    if methods.is_empty() {
        return Err(AggregateError::EmptyInput);
    }
    let higher_better = higher_is_better(key).ok_or_else(|| AggregateError::UnknownKey(key.into()))?;

    let baseline_dto = {
        let fetch = |k: &str| {
            baseline.metrics.get(k).map(|m| m.mean).ok_or_else(|| {
                AggregateError::MissingMetric { id: baseline.method_id.clone(), key: k.into() }
            })
        };
        let min = fetch(keys::MIN_GROUP)?;
        let max = fetch(keys::MAX_GROUP)?;
        let (dmin, dmax) = (100.0 - min, 100.0 - max);
        (dmin * dmin + dmax * dmax).sqrt()
    };
    for (agg, cmp) in methods {
        if (cmp.dto_baseline - baseline_dto).abs() > 1e-9 {
            return Err(AggregateError::MixedBaselines(agg.method_id.clone()));
        }
    }

    let mut rows: Vec<RankedRow> = methods
        .iter()
        .map(|(agg, cmp)| row_from_aggregate(agg, cmp.delta_dto))
        .collect();
    for row in &rows {
        if !row.cells.contains_key(key) {
            return Err(AggregateError::MissingMetric {
                id: row.method_id.clone(),
                key: key.into(),
            });
        }
    }

    rows.sort_by(|a, b| {
        let (va, vb) = (a.cells[key].mean, b.cells[key].mean);
        let by_value = if higher_better {
            vb.partial_cmp(&va)
        } else {
            va.partial_cmp(&vb)
        };
        by_value
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.method_id.cmp(&b.method_id))
    });

    let kind = if baseline.metrics.contains_key(keys::SDR) {
        TaskKind::Landmark
    } else {
        TaskKind::Classification
    };
    let present = |k: &str| {
        k == keys::DELTA_DTO
            || baseline.metrics.contains_key(k)
            || rows.iter().any(|r| r.cells.contains_key(k))
    };
    let columns: Vec<String> = COLUMN_ORDER
        .iter()
        .filter(|k| present(k))
        .map(|k| (*k).to_string())
        .collect();

    let mut best = BTreeMap::new();
    let mut second_best = BTreeMap::new();
    for column in &columns {
        let dir = higher_is_better(column).unwrap_or(true);
        let mut order: Vec<usize> = (0..rows.len())
            .filter(|&i| rows[i].cells.contains_key(column))
            .collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (rows[a].cells[column].mean, rows[b].cells[column].mean);
            let by_value = if dir { vb.partial_cmp(&va) } else { va.partial_cmp(&vb) };
            by_value.unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        if let Some(&i) = order.first() {
            best.insert(column.clone(), i);
        }
        if let Some(&i) = order.get(1) {
            second_best.insert(column.clone(), i);
        }
    }

    Ok(RankedTable {
        kind,
        key: key.into(),
        columns,
        baseline: row_from_aggregate(baseline, 0.0),
        rows,
        best,
        second_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relative::{compare_to_baseline, PerformancePoint};

    fn run(method: &str, task: &str, run: &str, pairs: &[(&str, f64)]) -> RunReport {
        RunReport {
            method_id: method.into(),
            task_id: task.into(),
            run_id: run.into(),
            values: pairs.iter().map(|(k, v)| ((*k).to_string(), *v)).collect(),
        }
    }

    #[test]
    fn mean_and_sample_std_over_three_runs() {
        let reports = vec![
            run("m", "t", "r0", &[("acc", 80.0)]),
            run("m", "t", "r1", &[("acc", 82.0)]),
            run("m", "t", "r2", &[("acc", 84.0)]),
        ];
        let agg = aggregate_runs(&reports).unwrap();
        assert_eq!(agg.n_runs, 3);
        assert_eq!(agg.metrics["acc"], MetricSummary { mean: 82.0, std: 2.0 });
        assert_eq!(agg.per_run["acc"], vec![80.0, 82.0, 84.0]);
    }

    #[test]
    fn single_run_has_zero_std() {
        let agg = aggregate_runs(&[run("m", "t", "r0", &[("acc", 91.5)])]).unwrap();
        assert_eq!(agg.metrics["acc"], MetricSummary { mean: 91.5, std: 0.0 });
    }

    #[test]
    fn aggregation_is_permutation_invariant() {
        let mut reports = vec![
            run("m", "t", "r0", &[("acc", 80.0), ("da", 5.0)]),
            run("m", "t", "r1", &[("acc", 82.0), ("da", 6.5)]),
            run("m", "t", "r2", &[("acc", 84.0), ("da", 4.25)]),
        ];
        let forward = aggregate_runs(&reports).unwrap();
        reports.reverse();
        assert_eq!(aggregate_runs(&reports).unwrap(), forward);
    }

    #[test]
    fn aggregate_input_is_validated() {
        assert_eq!(aggregate_runs(&[]), Err(AggregateError::EmptyInput));

        let mixed = vec![
            run("m", "t", "r0", &[("acc", 80.0)]),
            run("other", "t", "r1", &[("acc", 82.0)]),
        ];
        assert!(matches!(
            aggregate_runs(&mixed),
            Err(AggregateError::IdentityMismatch { .. })
        ));

        let duplicated = vec![
            run("m", "t", "r0", &[("acc", 80.0)]),
            run("m", "t", "r0", &[("acc", 82.0)]),
        ];
        assert_eq!(aggregate_runs(&duplicated), Err(AggregateError::DuplicateRun("r0".into())));

        let ragged = vec![
            run("m", "t", "r0", &[("acc", 80.0)]),
            run("m", "t", "r1", &[("acc", 82.0), ("da", 1.0)]),
        ];
        assert_eq!(aggregate_runs(&ragged), Err(AggregateError::MismatchedKeys { id: "r1".into() }));
    }

    fn aggregate(method: &str, task: &str, values: &[f64]) -> AggregateReport {
        let reports: Vec<RunReport> = values
            .iter()
            .enumerate()
            .map(|(i, v)| run(method, task, &format!("r{i}"), &[("acc", *v)]))
            .collect();
        aggregate_runs(&reports).unwrap()
    }

    #[test]
    fn task_average_is_identity_for_one_task() {
        let agg = aggregate("m", "eyebags", &[80.0, 82.0]);
        assert_eq!(average_tasks(&[agg.clone()]).unwrap(), agg);
    }

    #[test]
    fn task_average_pools_runs_for_the_std() {
        let a = aggregate("m", "t0", &[80.0, 82.0]);
        let b = aggregate("m", "t1", &[84.0, 86.0]);
        let avg = average_tasks(&[a, b]).unwrap();
        assert_eq!(avg.metrics["acc"].mean, 83.0);
        // Pooled sample std of {80, 82, 84, 86}.
        assert_eq!(avg.metrics["acc"].std, (20.0_f64 / 3.0).sqrt());
        assert_eq!(avg.n_runs, 4);
        assert_eq!(avg.per_run["acc"], vec![80.0, 82.0, 84.0, 86.0]);
    }

    #[test]
    fn task_average_falls_back_to_mean_of_stds() {
        let mut a = aggregate("m", "t0", &[80.0, 82.0]);
        let mut b = aggregate("m", "t1", &[84.0, 88.0]);
        a.per_run.clear();
        b.per_run.clear();
        let avg = average_tasks(&[a, b]).unwrap();
        assert_eq!(avg.metrics["acc"].mean, 83.5);
        // (sqrt(2) + sqrt(8)) / 2
        let expected = (2.0_f64.sqrt() + 8.0_f64.sqrt()) / 2.0;
        assert!((avg.metrics["acc"].std - expected).abs() < 1e-12);
        assert!(avg.per_run.is_empty());
    }

    #[test]
    fn pooled_mean_mode_weights_by_run_count() {
        let a = aggregate("m", "t0", &[80.0]);
        let b = aggregate("m", "t1", &[84.0, 86.0]);
        let task_means = average_tasks_with(&[a.clone(), b.clone()], TaskMeanMode::TaskMeans).unwrap();
        assert_eq!(task_means.metrics["acc"].mean, 82.5);
        let pooled = average_tasks_with(&[a, b], TaskMeanMode::PooledRuns).unwrap();
        assert!((pooled.metrics["acc"].mean - 250.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn task_average_input_is_validated() {
        assert_eq!(average_tasks(&[]), Err(AggregateError::EmptyInput));

        let a = aggregate("m", "t0", &[80.0]);
        let dup = aggregate("m", "t0", &[81.0]);
        assert_eq!(
            average_tasks(&[a.clone(), dup]),
            Err(AggregateError::DuplicateTask("t0".into()))
        );

        let other = aggregate("other", "t1", &[81.0]);
        assert!(matches!(
            average_tasks(&[a, other]),
            Err(AggregateError::IdentityMismatch { .. })
        ));
    }

    fn val_entry(checkpoint: u64, value: f64) -> CheckpointEntry {
        CheckpointEntry { checkpoint, split: Split::Val, min_group_value: value }
    }

    #[test]
    fn checkpoint_selection_maximizes_worst_group_score() {
        let history = [val_entry(500, 70.0), val_entry(1000, 74.0), val_entry(1500, 72.0)];
        assert_eq!(select_checkpoint(&history).unwrap(), 1000);
    }

    #[test]
    fn checkpoint_ties_go_to_the_earliest() {
        let history = [val_entry(1000, 74.0), val_entry(500, 74.0)];
        assert_eq!(select_checkpoint(&history).unwrap(), 500);
        assert_eq!(select_checkpoint(&[val_entry(2000, 10.0)]).unwrap(), 2000);
    }

    #[test]
    fn checkpoint_selection_rejects_bad_history() {
        assert_eq!(select_checkpoint(&[]), Err(AggregateError::EmptyHistory));
        let mixed = [
            val_entry(500, 70.0),
            CheckpointEntry { checkpoint: 1000, split: Split::Test, min_group_value: 80.0 },
        ];
        assert_eq!(
            select_checkpoint(&mixed),
            Err(AggregateError::WrongSplit { checkpoint: 1000, split: Split::Test })
        );
    }

    /// Builds a (aggregate, comparison) pair for a single-run method whose
    /// profile sits at (min, max) against the given baseline point.
    fn method_entry(
        id: &str,
        baseline: PerformancePoint,
        min: f64,
        max: f64,
        da: f64,
    ) -> (AggregateReport, ComparisonResult) {
        let point = PerformancePoint::new(min, max).unwrap();
        let cmp = compare_to_baseline(baseline, point);
        let report = run(
            id,
            "t",
            "r0",
            &[
                ("acc", (min + max) / 2.0),
                ("max_group", max),
                ("min_group", min),
                ("da", da),
                ("sigma_hf", cmp.sigma_hf),
            ],
        );
        (aggregate_runs(&[report]).unwrap(), cmp)
    }

    fn baseline_aggregate(point: PerformancePoint) -> AggregateReport {
        let cmp = compare_to_baseline(point, point);
        let report = run(
            "base",
            "t",
            "r0",
            &[
                ("acc", (point.min_group() + point.max_group()) / 2.0),
                ("max_group", point.max_group()),
                ("min_group", point.min_group()),
                ("da", point.gap()),
                ("sigma_hf", cmp.sigma_hf),
            ],
        );
        aggregate_runs(&[report]).unwrap()
    }

    #[test]
    fn ranking_sorts_by_key_and_marks_with_direction_awareness() {
        let base_point = PerformancePoint::new(60.0, 90.0).unwrap();
        let baseline = baseline_aggregate(base_point);
        let methods = vec![
            method_entry("worse", base_point, 55.0, 88.0, 33.0),
            method_entry("best", base_point, 75.0, 95.0, 20.0),
            method_entry("middle", base_point, 70.0, 92.0, 22.0),
        ];

        let table = rank_methods(&baseline, &methods, "sigma_hf").unwrap();
        let order: Vec<&str> = table.rows.iter().map(|r| r.method_id.as_str()).collect();
        assert_eq!(order, vec!["best", "middle", "worse"]);
        assert_eq!(table.kind, TaskKind::Classification);
        assert_eq!(
            table.columns,
            vec!["acc", "max_group", "min_group", "da", "delta_dto", "sigma_hf"]
        );

        // higher-better columns point at "best"; the lower-better DA column
        // must also pick the smallest value, which is "best" again here.
        assert_eq!(table.best["sigma_hf"], 0);
        assert_eq!(table.best["da"], 0);
        assert_eq!(table.second_best["da"], 1);
        // The baseline row carries its own metrics and a zero delta.
        assert_eq!(table.baseline.method_id, "base");
        assert_eq!(table.baseline.cells["delta_dto"].mean, 0.0);
    }

    #[test]
    fn ranking_by_delta_dto_equals_ranking_by_method_dto() {
        let base_point = PerformancePoint::new(60.0, 90.0).unwrap();
        let baseline = baseline_aggregate(base_point);
        let methods = vec![
            method_entry("a", base_point, 55.0, 88.0, 33.0),
            method_entry("b", base_point, 75.0, 95.0, 20.0),
            method_entry("c", base_point, 70.0, 92.0, 22.0),
        ];

        let table = rank_methods(&baseline, &methods, "delta_dto").unwrap();
        let by_delta: Vec<&str> = table.rows.iter().map(|r| r.method_id.as_str()).collect();

        let mut by_dto: Vec<(&str, f64)> = methods
            .iter()
            .map(|(agg, cmp)| (agg.method_id.as_str(), cmp.dto_method))
            .collect();
        by_dto.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let by_dto: Vec<&str> = by_dto.into_iter().map(|(id, _)| id).collect();

        assert_eq!(by_delta, by_dto);
    }

    #[test]
    fn equal_keys_rank_stably_by_method_id() {
        let base_point = PerformancePoint::new(60.0, 90.0).unwrap();
        let baseline = baseline_aggregate(base_point);
        let methods = vec![
            method_entry("zeta", base_point, 70.0, 92.0, 22.0),
            method_entry("alpha", base_point, 70.0, 92.0, 22.0),
        ];
        let table = rank_methods(&baseline, &methods, "sigma_hf").unwrap();
        let order: Vec<&str> = table.rows.iter().map(|r| r.method_id.as_str()).collect();
        assert_eq!(order, vec!["alpha", "zeta"]);
        // Identical values still yield one best and one second-best.
        assert_eq!(table.best["sigma_hf"], 0);
        assert_eq!(table.second_best["sigma_hf"], 1);
    }

    #[test]
    fn ranking_rejects_foreign_baselines_and_unknown_keys() {
        let base_point = PerformancePoint::new(60.0, 90.0).unwrap();
        let baseline = baseline_aggregate(base_point);
        let methods = vec![method_entry("a", base_point, 70.0, 92.0, 22.0)];
        assert_eq!(
            rank_methods(&baseline, &methods, "flux"),
            Err(AggregateError::UnknownKey("flux".into()))
        );

        let foreign_point = PerformancePoint::new(40.0, 80.0).unwrap();
        let foreign = vec![method_entry("a", foreign_point, 70.0, 92.0, 22.0)];
        assert_eq!(
            rank_methods(&baseline, &foreign, "sigma_hf"),
            Err(AggregateError::MixedBaselines("a".into()))
        );
    }
}
