//! Shared domain types: prediction records, the benchmark manifest, and
//! manifest validation.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::report::RenderOptions;

/// Dataset split a record was produced on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        };
        f.write_str(s)
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split '{other}'")),
        }
    }
}

/// 2D image coordinate, serialized as an `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn distance(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// One binary classification prediction for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub sample_id: String,
    /// Ground-truth label, 0 or 1.
    pub y_true: u8,
    /// Predicted label, 0 or 1.
    pub y_pred: u8,
    /// Raw positive-class score in [0, 1], when the log carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// Protected-group label.
    pub group: String,
    pub run_id: String,
    pub task_id: String,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<u64>,
}

/// One landmark detection prediction: K predicted and K ground-truth points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkRecord {
    pub sample_id: String,
    /// Protected-group label.
    pub group: String,
    pub pred: Vec<Point>,
    pub gt: Vec<Point>,
    /// Per-record normalization distance; overrides the manifest policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
    pub run_id: String,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<u64>,
}

impl LandmarkRecord {
    /// Number of landmarks per face.
    pub fn k(&self) -> usize {
        self.gt.len()
    }
}

/// Which kind of prediction logs a benchmark evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Classification,
    Landmark,
}

/// How the normalization distance for landmark error is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Distance between two ground-truth landmarks, given by index.
    Interocular(usize, usize),
    /// Fixed distance in pixels, shared by every record.
    Fixed(f64),
    /// Every record carries its own `norm` value.
    PerRecord,
}

impl Default for Normalization {
    /// Outer eye corners in the common 68-point annotation scheme.
    fn default() -> Self {
        Normalization::Interocular(36, 45)
    }
}

/// A method under evaluation and the prediction log for each of its runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method_id: String,
    /// One log path per run, in run order.
    pub runs: Vec<String>,
}

/// Declares a benchmark: the baseline, the contending methods, the group
/// labels, and the evaluation knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub task_kind: TaskKind,
    /// Must name one of `methods`.
    pub baseline_id: String,
    pub methods: Vec<MethodSpec>,
    pub group_labels: Vec<String>,
    /// Which label value counts as the positive class.
    #[serde(default = "default_positive_label")]
    pub positive_label: u8,
    /// Decision threshold applied to `score` when a log omits `y_pred`.
    #[serde(default = "default_score_threshold")]
    pub score_threshold: f64,
    /// Success threshold on normalized landmark error.
    #[serde(default = "default_sdr_threshold")]
    pub sdr_threshold: f64,
    /// Thresholds for sweep reports; strictly ascending when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub output: RenderOptions,
}

fn default_positive_label() -> u8 {
    1
}

fn default_score_threshold() -> f64 {
    0.5
}

fn default_sdr_threshold() -> f64 {
    0.08
}

/// A single manifest invariant violation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifestError {
    #[error("baseline_id '{0}' does not name any declared method")]
    MissingBaseline(String),
    #[error("method_id '{0}' is declared more than once")]
    DuplicateMethodId(String),
    #[error("method '{0}' declares no runs")]
    EmptyRuns(String),
    #[error("{field} = {value} must lie strictly between 0 and 1")]
    BadThreshold { field: &'static str, value: f64 },
    #[error("sweep_grid {0}")]
    BadSweepGrid(String),
    #[error("group_labels must list at least two groups")]
    TooFewGroups,
    #[error("group label '{0}' is declared more than once")]
    DuplicateGroupLabel(String),
    #[error("positive_label must be 0 or 1, got {0}")]
    BadPositiveLabel(u8),
}

/// Checks every manifest invariant and returns the manifest unchanged when
/// they all hold. Violations are collected, not short-circuited, so one
/// round of fixes can address everything.
pub fn validate_manifest(
    manifest: BenchmarkManifest,
) -> Result<BenchmarkManifest, Vec<ManifestError>> {
    let mut errors = Vec::new();

    if !manifest
        .methods
        .iter()
        .any(|m| m.method_id == manifest.baseline_id)
    {
        errors.push(ManifestError::MissingBaseline(manifest.baseline_id.clone()));
    }

    let mut seen = std::collections::BTreeSet::new();
    for method in &manifest.methods {
        if !seen.insert(method.method_id.as_str()) {
            errors.push(ManifestError::DuplicateMethodId(method.method_id.clone()));
        }
        if method.runs.is_empty() {
            errors.push(ManifestError::EmptyRuns(method.method_id.clone()));
        }
    }

    if manifest.group_labels.len() < 2 {
        errors.push(ManifestError::TooFewGroups);
    }
    let mut seen_groups = std::collections::BTreeSet::new();
    for label in &manifest.group_labels {
        if !seen_groups.insert(label.as_str()) {
            errors.push(ManifestError::DuplicateGroupLabel(label.clone()));
        }
    }

    if manifest.positive_label > 1 {
        errors.push(ManifestError::BadPositiveLabel(manifest.positive_label));
    }

    for (field, value) in [
        ("score_threshold", manifest.score_threshold),
        ("sdr_threshold", manifest.sdr_threshold),
    ] {
        if !(value > 0.0 && value < 1.0) {
            errors.push(ManifestError::BadThreshold { field, value });
        }
    }

    if let Some(grid) = &manifest.sweep_grid {
        if grid.is_empty() {
            errors.push(ManifestError::BadSweepGrid("must not be empty".into()));
        }
        if grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            errors.push(ManifestError::BadSweepGrid(
                "entries must lie strictly between 0 and 1".into(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            errors.push(ManifestError::BadSweepGrid(
                "entries must be strictly ascending".into(),
            ));
        }
    }

    if errors.is_empty() {
        Ok(manifest)
    } else {
        Err(errors)
    }
}
