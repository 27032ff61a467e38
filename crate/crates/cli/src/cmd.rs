//! Implementations of the CLI subcommands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use fairbench_core::ingest::{classification_to_csv, landmark_to_jsonl};
use fairbench_core::{
    aggregate_runs, average_tasks, compare_landmark, compare_to_baseline, default_sweep_grid,
    generate_classification, generate_landmark, hf_isoline_grid, rank_methods,
    render_isolines_csv, render_sweep_csv, render_sweep_svg, render_table, select_checkpoint,
    AggregateError, AggregateReport, BenchmarkManifest, CheckpointEntry, ComparisonResult,
    GroupProfile, PerformancePoint, RunReport, Split, SuccessProfile, SweepCurve, SweepSeries,
    SynthSpec, TableFormat, TaskKind,
};

use crate::load::{self, CellValue};
use crate::{
    CliError, CompareArgs, EvaluateArgs, IsolinesArgs, RankArgs, SelectArgs, SweepArgs, SynthArgs,
};

fn print_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn classification_line(task: &str, p: &GroupProfile) -> String {
    format!(
        "task {task}: acc {:.2} | MGA {:.2} ({}) | mGA {:.2} ({}) | DA {:.2} | DEO {:.2} | DEOdds {:.2}",
        p.accuracy,
        p.max_group.percent,
        p.max_group.group,
        p.min_group.percent,
        p.min_group.group,
        p.da,
        p.deo,
        p.deodds
    )
}

fn landmark_line(p: &SuccessProfile) -> String {
    format!(
        "SDR@{:.3}: {:.2} | MGS {:.2} ({}) | mGS {:.2} ({}) | DS {:.2}",
        p.threshold,
        p.sdr_overall,
        p.max_group.percent,
        p.max_group.group,
        p.min_group.percent,
        p.min_group.group,
        p.ds
    )
}

fn comparison_line(cmp: &ComparisonResult) -> String {
    format!(
        "HF {:.2} | σ(HF) {:.3} | ΔDTO {:.2} | DTO {:.2} -> {:.2}",
        cmp.hf, cmp.sigma_hf, cmp.delta_dto, cmp.dto_baseline, cmp.dto_method
    )
}

fn profile_point(profile_min: f64, profile_max: f64) -> Result<PerformancePoint, CliError> {
    load::feasible_point(profile_min, profile_max)
}

pub(crate) fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let (mut manifest, _) = load::read_manifest(&args.manifest)?;
    load::apply_threshold(&mut manifest, args.threshold)?;
    match manifest.task_kind {
        TaskKind::Classification => {
            let (records, warnings) = load::read_classification_log(&args.log, &manifest)?;
            print_warnings(&warnings);
            let profiles = load::classification_profiles(records, &manifest, &args.log, false)?;
            if args.json {
                print_json(&json!({ "task_kind": "classification", "tasks": profiles }));
            } else {
                for (task, profile) in &profiles {
                    println!("{}", classification_line(task, profile));
                }
            }
        }
        TaskKind::Landmark => {
            let (records, warnings) = load::read_landmark_log(&args.log, &manifest)?;
            print_warnings(&warnings);
            let profile = load::landmark_profile(records, &manifest, &args.log, false)?;
            if args.json {
                print_json(&json!({ "task_kind": "landmark", "profile": profile }));
            } else {
                println!("{}", landmark_line(&profile));
            }
        }
    }
    Ok(())
}

pub(crate) fn compare(args: CompareArgs) -> Result<(), CliError> {
    let (mut manifest, _) = load::read_manifest(&args.manifest)?;
    load::apply_threshold(&mut manifest, args.threshold)?;
    match manifest.task_kind {
        TaskKind::Classification => {
            let (base_records, warnings) = load::read_classification_log(&args.baseline, &manifest)?;
            print_warnings(&warnings);
            let (method_records, warnings) = load::read_classification_log(&args.method, &manifest)?;
            print_warnings(&warnings);
            let base = load::classification_profiles(base_records, &manifest, &args.baseline, false)?;
            let method = load::classification_profiles(method_records, &manifest, &args.method, false)?;

            let mut comparisons = BTreeMap::new();
            for (task, method_profile) in &method {
                let base_profile = base.get(task).ok_or_else(|| {
                    CliError::input(format!(
                        "baseline log {} lacks task '{task}' present in the method log",
                        args.baseline.display()
                    ))
                })?;
                let b = profile_point(base_profile.min_group.percent, base_profile.max_group.percent)?;
                let m = profile_point(method_profile.min_group.percent, method_profile.max_group.percent)?;
                comparisons.insert(task.clone(), compare_to_baseline(b, m));
            }
            if args.json {
                print_json(&json!({ "task_kind": "classification", "tasks": comparisons }));
            } else {
                for (task, cmp) in &comparisons {
                    println!("task {task}: {}", comparison_line(cmp));
                }
            }
        }
        TaskKind::Landmark => {
            let (base_records, warnings) = load::read_landmark_log(&args.baseline, &manifest)?;
            print_warnings(&warnings);
            let (method_records, warnings) = load::read_landmark_log(&args.method, &manifest)?;
            print_warnings(&warnings);
            let base = load::landmark_profile(base_records, &manifest, &args.baseline, false)?;
            let method = load::landmark_profile(method_records, &manifest, &args.method, false)?;
            let cmp = compare_landmark(&base, &method)
                .map_err(|e| CliError::internal(format!("comparison failed: {e}")))?;
            if args.json {
                print_json(&json!({ "task_kind": "landmark", "comparison": cmp }));
            } else {
                println!("{}", comparison_line(&cmp));
            }
        }
    }
    Ok(())
}

/// Loads and profiles every (method, run) cell in parallel, then hands the
/// results back in manifest order.
fn evaluate_grid(
    manifest: &BenchmarkManifest,
    base_dir: &std::path::Path,
) -> Result<Vec<Vec<CellValue>>, CliError> {
    let jobs: Vec<PathBuf> = manifest
        .methods
        .iter()
        .flat_map(|m| m.runs.iter().map(|r| base_dir.join(r)))
        .collect();
    let results: Vec<Result<(CellValue, Vec<String>), CliError>> =
        jobs.par_iter().map(|path| load::evaluate_cell(path, manifest)).collect();

    let mut cells: Vec<Vec<CellValue>> = Vec::with_capacity(manifest.methods.len());
    let mut results = results.into_iter();
    for method in &manifest.methods {
        let mut row = Vec::with_capacity(method.runs.len());
        for _ in &method.runs {
            let (value, warnings) = results.next().expect("one result per job")?;
            print_warnings(&warnings);
            row.push(value);
        }
        cells.push(row);
    }
    Ok(cells)
}

fn baseline_index(manifest: &BenchmarkManifest) -> usize {
    manifest
        .methods
        .iter()
        .position(|m| m.method_id == manifest.baseline_id)
        .expect("validated manifest contains its baseline")
}

fn as_classification(cell: &CellValue) -> &BTreeMap<String, GroupProfile> {
    match cell {
        CellValue::Classification(profiles) => profiles,
        CellValue::Landmark(_) => unreachable!("task kind fixed by manifest"),
    }
}

fn as_landmark(cell: &CellValue) -> &SuccessProfile {
    match cell {
        CellValue::Landmark(profile) => profile,
        CellValue::Classification(_) => unreachable!("task kind fixed by manifest"),
    }
}

fn metric_mean(agg: &AggregateReport, key: &str) -> Result<f64, CliError> {
    agg.metrics.get(key).map(|s| s.mean).ok_or_else(|| {
        CliError::internal(format!("aggregate for '{}' lacks metric '{key}'", agg.method_id))
    })
}

fn aggregate_point(agg: &AggregateReport) -> Result<PerformancePoint, CliError> {
    profile_point(metric_mean(agg, "min_group")?, metric_mean(agg, "max_group")?)
}

/// Aggregates each method's runs into one report. Per-run σ(HF) pairs the
/// i-th run of a method with the i-th baseline run, so run counts must
/// match the baseline's.
fn aggregate_methods(
    manifest: &BenchmarkManifest,
    cells: &[Vec<CellValue>],
) -> Result<Vec<AggregateReport>, CliError> {
    let bi = baseline_index(manifest);
    let n_runs = cells[bi].len();

    let run_count_error = |method_id: &str, have: usize| {
        CliError::input(format!(
            "method '{method_id}' has {have} runs but the baseline has {n_runs}; \
             per-run comparison pairs runs by position"
        ))
    };

    match manifest.task_kind {
        TaskKind::Classification => {
            let base_runs: Vec<&BTreeMap<String, GroupProfile>> =
                cells[bi].iter().map(as_classification).collect();
            let task_ids: Vec<String> = base_runs[0].keys().cloned().collect();
            for (ri, run) in base_runs.iter().enumerate() {
                if run.len() != task_ids.len() || !task_ids.iter().all(|t| run.contains_key(t)) {
                    return Err(CliError::input(format!(
                        "baseline run '{}' does not cover the same tasks as the first \
                         baseline run",
                        manifest.methods[bi].runs[ri]
                    )));
                }
            }
            let mut base_points: BTreeMap<&str, Vec<PerformancePoint>> = BTreeMap::new();
            for task in &task_ids {
                let points = base_runs
                    .iter()
                    .map(|run| {
                        let p = &run[task];
                        profile_point(p.min_group.percent, p.max_group.percent)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                base_points.insert(task, points);
            }

            let mut aggregates = Vec::with_capacity(manifest.methods.len());
            for (mi, method) in manifest.methods.iter().enumerate() {
                let runs: Vec<&BTreeMap<String, GroupProfile>> =
                    cells[mi].iter().map(as_classification).collect();
                if runs.len() != n_runs {
                    return Err(run_count_error(&method.method_id, runs.len()));
                }
                for (ri, run) in runs.iter().enumerate() {
                    if run.len() != task_ids.len() {
                        return Err(CliError::input(format!(
                            "run '{}' of method '{}' does not cover the baseline's tasks",
                            method.runs[ri], method.method_id
                        )));
                    }
                }
                let mut per_task = Vec::with_capacity(task_ids.len());
                for task in &task_ids {
                    let mut reports = Vec::with_capacity(n_runs);
                    for (ri, run) in runs.iter().enumerate() {
                        let profile = run.get(task).ok_or_else(|| {
                            CliError::input(format!(
                                "run '{}' of method '{}' lacks task '{task}'",
                                method.runs[ri], method.method_id
                            ))
                        })?;
                        let point = profile_point(profile.min_group.percent, profile.max_group.percent)?;
                        let cmp = compare_to_baseline(base_points[task.as_str()][ri], point);
                        reports.push(RunReport::from_classification(
                            &method.method_id,
                            task,
                            &method.runs[ri],
                            profile,
                            Some(&cmp),
                        ));
                    }
                    per_task.push(aggregate_runs(&reports).map_err(|e| {
                        aggregate_error(&method.method_id, Some(task), e)
                    })?);
                }
                aggregates.push(
                    average_tasks(&per_task)
                        .map_err(|e| aggregate_error(&method.method_id, None, e))?,
                );
            }
            Ok(aggregates)
        }
        TaskKind::Landmark => {
            let base_runs: Vec<&SuccessProfile> = cells[bi].iter().map(as_landmark).collect();
            let mut aggregates = Vec::with_capacity(manifest.methods.len());
            for (mi, method) in manifest.methods.iter().enumerate() {
                let runs: Vec<&SuccessProfile> = cells[mi].iter().map(as_landmark).collect();
                if runs.len() != n_runs {
                    return Err(run_count_error(&method.method_id, runs.len()));
                }
                let mut reports = Vec::with_capacity(n_runs);
                for (ri, profile) in runs.iter().enumerate() {
                    let cmp = compare_landmark(base_runs[ri], profile)
                        .map_err(|e| CliError::internal(format!("comparison failed: {e}")))?;
                    reports.push(RunReport::from_landmark(
                        &method.method_id,
                        "landmark",
                        &method.runs[ri],
                        profile,
                        Some(&cmp),
                    ));
                }
                aggregates.push(
                    aggregate_runs(&reports)
                        .map_err(|e| aggregate_error(&method.method_id, None, e))?,
                );
            }
            Ok(aggregates)
        }
    }
}

fn aggregate_error(method_id: &str, task: Option<&str>, err: AggregateError) -> CliError {
    match task {
        Some(task) => CliError::input(format!("method '{method_id}', task '{task}': {err}")),
        None => CliError::input(format!("method '{method_id}': {err}")),
    }
}

fn format_extension(format: TableFormat) -> &'static str {
    match format {
        TableFormat::Markdown => "md",
        TableFormat::Csv => "csv",
        TableFormat::Tsv => "tsv",
    }
}

pub(crate) fn rank(args: RankArgs) -> Result<(), CliError> {
    let (manifest, base_dir) = load::read_manifest(&args.manifest)?;
    if manifest.methods.len() < 2 {
        return Err(CliError::input(
            "ranking needs at least one method besides the baseline".to_string(),
        ));
    }
    let cells = evaluate_grid(&manifest, &base_dir)?;
    let aggregates = aggregate_methods(&manifest, &cells)?;

    let bi = baseline_index(&manifest);
    let base_agg = aggregates[bi].clone();
    let base_point = aggregate_point(&base_agg)?;
    let mut method_inputs: Vec<(AggregateReport, ComparisonResult)> = Vec::new();
    for (mi, agg) in aggregates.into_iter().enumerate() {
        if mi == bi {
            continue;
        }
        let cmp = compare_to_baseline(base_point, aggregate_point(&agg)?);
        method_inputs.push((agg, cmp));
    }

    let table = rank_methods(&base_agg, &method_inputs, args.key.metric_key())
        .map_err(|e| CliError::internal(format!("ranking failed: {e}")))?;

    let mut opts = manifest.output.clone();
    if let Some(format) = args.format {
        opts.format = format.into();
    }
    let text = render_table(&table, &opts)
        .map_err(|e| CliError::internal(format!("rendering failed: {e}")))?;

    if let Some(out) = &args.out {
        let name = format!("rank.{}", format_extension(opts.format));
        let path = load::write_out(out, &name, &text)?;
        eprintln!("wrote {}", path.display());
    }
    if args.json {
        print_json(&serde_json::to_value(&table).expect("table serializes"));
    } else {
        print!("{text}");
    }
    Ok(())
}

pub(crate) fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let (manifest, base_dir) = load::read_manifest(&args.manifest)?;
    if manifest.task_kind != TaskKind::Landmark {
        return Err(CliError::input(
            "sweep requires a landmark benchmark (task_kind = landmark)".to_string(),
        ));
    }
    if manifest.methods.len() < 2 {
        return Err(CliError::input(
            "sweeping needs at least one method besides the baseline".to_string(),
        ));
    }
    let grid = match &args.grid {
        Some(spec) => load::parse_grid(spec)?,
        None => manifest.sweep_grid.clone().unwrap_or_else(default_sweep_grid),
    };

    // Pool each method's runs into one evaluation set of test records.
    let pooled: Vec<Result<(Vec<fairbench_core::LandmarkRecord>, Vec<String>), CliError>> =
        manifest
            .methods
            .par_iter()
            .map(|method| {
                let mut records = Vec::new();
                let mut warnings = Vec::new();
                for run in &method.runs {
                    let (mut runs_records, w) =
                        load::read_landmark_log(&base_dir.join(run), &manifest)?;
                    records.append(&mut runs_records);
                    warnings.extend(w);
                }
                records.retain(|r| r.split == Split::Test);
                if records.is_empty() {
                    return Err(CliError::input(format!(
                        "method '{}' has no test-split records to sweep",
                        method.method_id
                    )));
                }
                Ok((records, warnings))
            })
            .collect();
    let mut records_by_method = Vec::with_capacity(manifest.methods.len());
    for result in pooled {
        let (records, warnings) = result?;
        print_warnings(&warnings);
        records_by_method.push(records);
    }

    let bi = baseline_index(&manifest);
    let mut curves = Vec::new();
    for (mi, method) in manifest.methods.iter().enumerate() {
        if mi == bi {
            continue;
        }
        let entries = fairbench_core::threshold_sweep(
            &records_by_method[bi],
            &records_by_method[mi],
            &grid,
            &manifest.normalization,
        )
        .map_err(|e| CliError::input(format!("method '{}': {e}", method.method_id)))?;
        curves.push(SweepCurve { method_id: method.method_id.clone(), entries });
    }
    let series = SweepSeries::new(grid, curves)
        .map_err(|e| CliError::internal(format!("sweep assembly failed: {e}")))?;

    let csv = render_sweep_csv(&series, &manifest.output)
        .map_err(|e| CliError::internal(format!("rendering failed: {e}")))?;
    let svg = render_sweep_svg(&series, args.key.sweep_metric(), &manifest.output)
        .map_err(|e| CliError::internal(format!("rendering failed: {e}")))?;

    if let Some(out) = &args.out {
        let csv_path = load::write_out(out, "sweep.csv", &csv)?;
        let svg_path = load::write_out(out, "sweep.svg", &svg)?;
        eprintln!("wrote {}", csv_path.display());
        eprintln!("wrote {}", svg_path.display());
    }
    if args.json {
        print_json(&serde_json::to_value(&series).expect("series serializes"));
    } else {
        print!("{csv}");
    }
    Ok(())
}

/// Aggregates the baseline's runs without baseline-relative metrics; used
/// where only the baseline's mean (min, max) point is needed.
fn baseline_aggregate(
    manifest: &BenchmarkManifest,
    base_dir: &std::path::Path,
) -> Result<AggregateReport, CliError> {
    let bi = baseline_index(manifest);
    let method = &manifest.methods[bi];
    let mut cells = Vec::with_capacity(method.runs.len());
    for run in &method.runs {
        let (cell, warnings) = load::evaluate_cell(&base_dir.join(run), manifest)?;
        print_warnings(&warnings);
        cells.push(cell);
    }
    match manifest.task_kind {
        TaskKind::Classification => {
            let runs: Vec<&BTreeMap<String, GroupProfile>> =
                cells.iter().map(as_classification).collect();
            let task_ids: Vec<String> = runs[0].keys().cloned().collect();
            let mut per_task = Vec::with_capacity(task_ids.len());
            for task in &task_ids {
                let mut reports = Vec::with_capacity(runs.len());
                for (ri, run) in runs.iter().enumerate() {
                    let profile = run.get(task).ok_or_else(|| {
                        CliError::input(format!(
                            "baseline run '{}' lacks task '{task}'",
                            method.runs[ri]
                        ))
                    })?;
                    reports.push(RunReport::from_classification(
                        &method.method_id,
                        task,
                        &method.runs[ri],
                        profile,
                        None,
                    ));
                }
                per_task.push(
                    aggregate_runs(&reports)
                        .map_err(|e| aggregate_error(&method.method_id, Some(task), e))?,
                );
            }
            average_tasks(&per_task).map_err(|e| aggregate_error(&method.method_id, None, e))
        }
        TaskKind::Landmark => {
            let reports: Vec<RunReport> = cells
                .iter()
                .zip(&method.runs)
                .map(|(cell, run)| {
                    RunReport::from_landmark(
                        &method.method_id,
                        "landmark",
                        run,
                        as_landmark(cell),
                        None,
                    )
                })
                .collect();
            aggregate_runs(&reports).map_err(|e| aggregate_error(&method.method_id, None, e))
        }
    }
}

pub(crate) fn isolines(args: IsolinesArgs) -> Result<(), CliError> {
    let (manifest, base_dir) = load::read_manifest(&args.manifest)?;
    let base_agg = baseline_aggregate(&manifest, &base_dir)?;
    let baseline = aggregate_point(&base_agg)?;
    let grid = hf_isoline_grid(baseline, args.resolution)
        .map_err(|e| CliError::input(format!("--resolution: {e}")))?;
    let csv = render_isolines_csv(&grid);

    if let Some(out) = &args.out {
        let path = load::write_out(out, "isolines.csv", &csv)?;
        eprintln!("wrote {}", path.display());
    }
    if args.json {
        print_json(&serde_json::to_value(&grid).expect("grid serializes"));
    } else {
        print!("{csv}");
    }
    Ok(())
}

pub(crate) fn select(args: SelectArgs) -> Result<(), CliError> {
    let (manifest, _) = load::read_manifest(&args.manifest)?;
    let entries: Vec<CheckpointEntry> = match manifest.task_kind {
        TaskKind::Classification => {
            let (records, warnings) = load::read_classification_log(&args.log, &manifest)?;
            print_warnings(&warnings);
            let mut by_checkpoint: BTreeMap<u64, Vec<_>> = BTreeMap::new();
            for record in records.into_iter().filter(|r| r.split == Split::Val) {
                let checkpoint = record.checkpoint.ok_or_else(|| {
                    CliError::input(format!(
                        "log {}: validation records must carry checkpoint values",
                        args.log.display()
                    ))
                })?;
                by_checkpoint.entry(checkpoint).or_default().push(record);
            }
            if by_checkpoint.is_empty() {
                return Err(CliError::input(format!(
                    "log {} has no val-split records",
                    args.log.display()
                )));
            }
            by_checkpoint
                .into_iter()
                .map(|(checkpoint, records)| {
                    fairness_report_entry(&records, &manifest, checkpoint, &args.log)
                })
                .collect::<Result<_, _>>()?
        }
        TaskKind::Landmark => {
            let (records, warnings) = load::read_landmark_log(&args.log, &manifest)?;
            print_warnings(&warnings);
            let mut by_checkpoint: BTreeMap<u64, Vec<_>> = BTreeMap::new();
            for record in records.into_iter().filter(|r| r.split == Split::Val) {
                let checkpoint = record.checkpoint.ok_or_else(|| {
                    CliError::input(format!(
                        "log {}: validation records must carry checkpoint values",
                        args.log.display()
                    ))
                })?;
                by_checkpoint.entry(checkpoint).or_default().push(record);
            }
            if by_checkpoint.is_empty() {
                return Err(CliError::input(format!(
                    "log {} has no val-split records",
                    args.log.display()
                )));
            }
            by_checkpoint
                .into_iter()
                .map(|(checkpoint, records)| {
                    fairbench_core::group_success_profile(
                        &records,
                        manifest.sdr_threshold,
                        &manifest.normalization,
                    )
                    .map(|profile| CheckpointEntry::from_landmark(checkpoint, Split::Val, &profile))
                    .map_err(|e| {
                        CliError::input(format!(
                            "log {}, checkpoint {checkpoint}: {e}",
                            args.log.display()
                        ))
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };

    let best = select_checkpoint(&entries)
        .map_err(|e| CliError::internal(format!("selection failed: {e}")))?;
    let value = entries
        .iter()
        .find(|e| e.checkpoint == best)
        .map(|e| e.min_group_value)
        .expect("selected checkpoint comes from the history");
    if args.json {
        print_json(&json!({ "checkpoint": best, "min_group": value }));
    } else {
        println!("checkpoint {best} (worst group {value:.2})");
    }
    Ok(())
}

fn fairness_report_entry(
    records: &[fairbench_core::ClassificationRecord],
    manifest: &BenchmarkManifest,
    checkpoint: u64,
    log: &std::path::Path,
) -> Result<CheckpointEntry, CliError> {
    fairbench_core::fairness_report(records, manifest)
        .map(|profile| CheckpointEntry::from_classification(checkpoint, Split::Val, &profile))
        .map_err(|e| {
            CliError::input(format!("log {}, checkpoint {checkpoint}: {e}", log.display()))
        })
}

pub(crate) fn synth(args: SynthArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::input(format!("cannot read spec {}: {e}", args.spec.display())))?;
    let spec: SynthSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("spec {}: {e}", args.spec.display())))?;
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));

    let (path, records, kind) = match spec {
        SynthSpec::Classification { groups } => {
            let records = generate_classification(&groups, args.seed)
                .map_err(|e| CliError::input(format!("spec {}: {e}", args.spec.display())))?;
            let csv = classification_to_csv(&records);
            let path = load::write_out(&out_dir, "synthetic.csv", &csv)?;
            (path, records.len(), "classification")
        }
        SynthSpec::Landmark { groups, k } => {
            let records = generate_landmark(&groups, k, args.seed)
                .map_err(|e| CliError::input(format!("spec {}: {e}", args.spec.display())))?;
            let jsonl = landmark_to_jsonl(&records);
            let path = load::write_out(&out_dir, "synthetic.jsonl", &jsonl)?;
            (path, records.len(), "landmark")
        }
    };

    if args.json {
        print_json(&json!({
            "path": path.display().to_string(),
            "records": records,
            "task_kind": kind,
            "seed": args.seed,
        }));
    } else {
        println!("wrote {records} {kind} records to {}", path.display());
    }
    Ok(())
}
