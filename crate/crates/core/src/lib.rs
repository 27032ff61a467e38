//! Group-fairness metrics for benchmarking classifiers and landmark
//! detectors across demographic groups.
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`] parses prediction logs (CSV or JSONL) into typed records.
//! - [`classify`] and [`landmark`] turn records into per-group profiles:
//!   accuracy extremes, DEO/DEOdds, NME/SDR success rates.
//! - [`relative`] compares a method's (min, max) performance point against
//!   a baseline: harmonic fairness HF, its sigmoid rescale σ(HF), and the
//!   distance-to-optimum change ΔDTO.
//! - [`aggregate`] averages runs and tasks, selects checkpoints, and ranks
//!   methods into a table.
//! - [`report`] renders tables, sweep curves, and isoline grids as text.
//! - [`synth`] generates synthetic logs with exact confusion counts and
//!   carries a brute-force oracle used to cross-check the fast paths.

pub mod aggregate;
pub mod classify;
pub mod ingest;
pub mod landmark;
pub mod model;
pub mod relative;
pub mod report;
pub mod synth;

pub use aggregate::{
    aggregate_runs, average_tasks, average_tasks_with, rank_methods, select_checkpoint,
    AggregateError, AggregateReport, CheckpointEntry, MetricSummary, RankedRow, RankedTable,
    RunReport, TaskMeanMode,
};
pub use classify::{fairness_report, Confusion, GroupProfile, GroupValue, MetricError, RateSet};
pub use ingest::{
    load_manifest, parse_classification_log, parse_landmark_log, IngestError, ParseReport,
};
pub use landmark::{
    compare_landmark, default_sweep_grid, group_success_profile, threshold_sweep, LandmarkError,
    SuccessProfile, SweepCurve, SweepEntry, SweepSeries,
};
pub use model::{
    validate_manifest, BenchmarkManifest, ClassificationRecord, LandmarkRecord, ManifestError,
    MethodSpec, Normalization, Point, Split, TaskKind,
};
pub use relative::{
    compare_to_baseline, compute_dto, hf_isoline_grid, ComparisonResult, IsolineGrid,
    PerformancePoint, RelativeError,
};
pub use report::{
    render_isolines_csv, render_sweep_csv, render_sweep_svg, render_table, RenderError,
    RenderOptions, SweepMetric, TableFormat,
};
pub use synth::{
    generate_classification, generate_landmark, oracle_report, GroupSpec, LandmarkGroupSpec,
    SynthError, SynthSpec,
};
