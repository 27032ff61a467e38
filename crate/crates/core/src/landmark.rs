//! Landmark detection metrics. Per-image error is the normalized mean
//! error (NME): mean Euclidean distance between predicted and ground-truth
//! points, divided by a normalization distance. An image counts as a
//! success when its NME falls strictly below a threshold; the success
//! detection rate (SDR) is the percentage of successes. Group fairness then
//! mirrors the classification side: best group (MGS), worst group (mGS),
//! and their spread (DS).

use serde::Serialize;
use std::collections::BTreeMap;

use crate::classify::GroupValue;
use crate::model::{LandmarkRecord, Normalization, Point};
use crate::relative::{compare_to_baseline, ComparisonResult, PerformancePoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LandmarkError {
    #[error("no records to evaluate")]
    EmptyInput,
    #[error("records cover a single group; fairness gaps need at least two")]
    SingleGroup,
    #[error("group '{0}' has no observations")]
    EmptyGroup(String),
    #[error("sample '{sample_id}' has {pred} predicted points but {gt} ground-truth points")]
    KMismatch { sample_id: String, pred: usize, gt: usize },
    #[error("sample '{sample_id}' has no landmarks")]
    NoLandmarks { sample_id: String },
    #[error("sample '{sample_id}' has a non-finite coordinate")]
    NonFiniteCoordinate { sample_id: String },
    #[error("normalization distance for sample '{sample_id}' is not a positive finite number")]
    ZeroNormalization { sample_id: String },
    #[error("per-record normalization requested but sample '{sample_id}' carries no norm")]
    MissingNormalization { sample_id: String },
    #[error("interocular index {index} is out of range for sample '{sample_id}' with {k} landmarks")]
    BadInterocularIndex { sample_id: String, index: usize, k: usize },
    #[error("success threshold must be positive, got {0}")]
    BadThreshold(f64),
    #[error("profiles were computed at different thresholds: {baseline} vs {method}")]
    ThresholdMismatch { baseline: f64, method: f64 },
    #[error("sweep grid {0}")]
    BadGrid(String),
    #[error("heatmap plane {plane} does not match the declared {height}x{width} shape")]
    BadPlaneShape { plane: usize, height: usize, width: usize },
    #[error("heatmap plane {plane} contains a non-finite value")]
    NonFiniteHeatmap { plane: usize },
}

/// Normalized mean error of a single image. The per-record `norm` value
/// wins over the manifest policy when present.
pub fn nme(rec: &LandmarkRecord, normalization: &Normalization) -> Result<f64, LandmarkError> {
    let k = rec.gt.len();
    if rec.pred.len() != k {
        return Err(LandmarkError::KMismatch {
            sample_id: rec.sample_id.clone(),
            pred: rec.pred.len(),
            gt: k,
        });
    }
    if k == 0 {
        return Err(LandmarkError::NoLandmarks { sample_id: rec.sample_id.clone() });
    }
    if rec.pred.iter().chain(&rec.gt).any(|p| !p.is_finite()) {
        return Err(LandmarkError::NonFiniteCoordinate { sample_id: rec.sample_id.clone() });
    }

    let norm = match rec.norm {
        Some(d) => d,
        None => match *normalization {
            Normalization::Fixed(d) => d,
            Normalization::Interocular(i, j) => {
                let fetch = |index: usize| {
                    rec.gt.get(index).copied().ok_or(LandmarkError::BadInterocularIndex {
                        sample_id: rec.sample_id.clone(),
                        index,
                        k,
                    })
                };
                fetch(i)?.distance(fetch(j)?)
            }
            Normalization::PerRecord => {
                return Err(LandmarkError::MissingNormalization {
                    sample_id: rec.sample_id.clone(),
                })
            }
        },
    };
    if !norm.is_finite() || norm <= 0.0 {
        return Err(LandmarkError::ZeroNormalization { sample_id: rec.sample_id.clone() });
    }

    let total: f64 = rec
        .pred
        .iter()
        .zip(&rec.gt)
        .map(|(p, g)| p.distance(*g))
        .sum();
    Ok(total / k as f64 / norm)
}

/// Percentage of errors strictly below `threshold`. An error exactly at the
/// threshold does not count as a success.
pub fn sdr(nmes: &[f64], threshold: f64) -> Result<f64, LandmarkError> {
    if nmes.is_empty() {
        return Err(LandmarkError::EmptyInput);
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(LandmarkError::BadThreshold(threshold));
    }
    let hits = nmes.iter().filter(|&&e| e < threshold).count();
    Ok(100.0 * hits as f64 / nmes.len() as f64)
}

/// Per-image NMEs bucketed by group. Records are processed in ascending
/// `sample_id` order so the result does not depend on input order.
pub fn group_nmes(
    records: &[LandmarkRecord],
    normalization: &Normalization,
) -> Result<BTreeMap<String, Vec<f64>>, LandmarkError> {
    if records.is_empty() {
        return Err(LandmarkError::EmptyInput);
    }
    let mut sorted: Vec<&LandmarkRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for rec in sorted {
        out.entry(rec.group.clone())
            .or_default()
            .push(nme(rec, normalization)?);
    }
    Ok(out)
}

/// Success statistics for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupLandmarkStats {
    pub n: usize,
    pub mean_nme: f64,
    pub sdr: f64,
}

/// Group success profile of one landmark evaluation cell at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessProfile {
    pub threshold: f64,
    pub per_group: BTreeMap<String, GroupLandmarkStats>,
    /// SDR pooled over all groups.
    pub sdr_overall: f64,
    /// Best-performing group (MGS).
    pub max_group: GroupValue,
    /// Worst-performing group (mGS).
    pub min_group: GroupValue,
    /// Success-rate gap: MGS - mGS.
    pub ds: f64,
}

/// Builds a profile from already-computed per-group NME lists.
pub fn profile_from_nmes(
    per_group_nmes: &BTreeMap<String, Vec<f64>>,
    threshold: f64,
) -> Result<SuccessProfile, LandmarkError> {
    if per_group_nmes.is_empty() {
        return Err(LandmarkError::EmptyInput);
    }
    if per_group_nmes.len() < 2 {
        return Err(LandmarkError::SingleGroup);
    }

    let mut per_group = BTreeMap::new();
    let mut hits: usize = 0;
    let mut total: usize = 0;
    for (group, nmes) in per_group_nmes {
        if nmes.is_empty() {
            return Err(LandmarkError::EmptyGroup(group.clone()));
        }
        let rate = sdr(nmes, threshold)?;
        per_group.insert(
            group.clone(),
            GroupLandmarkStats {
                n: nmes.len(),
                mean_nme: nmes.iter().sum::<f64>() / nmes.len() as f64,
                sdr: rate,
            },
        );
        hits += nmes.iter().filter(|&&e| e < threshold).count();
        total += nmes.len();
    }
    let sdr_overall = 100.0 * hits as f64 / total as f64;

    let mut max_group: Option<GroupValue> = None;
    let mut min_group: Option<GroupValue> = None;
    for (group, stats) in &per_group {
        if max_group.as_ref().is_none_or(|m| stats.sdr > m.percent) {
            max_group = Some(GroupValue { group: group.clone(), percent: stats.sdr });
        }
        if min_group.as_ref().is_none_or(|m| stats.sdr < m.percent) {
            min_group = Some(GroupValue { group: group.clone(), percent: stats.sdr });
        }
    }
    let max_group = max_group.expect("at least two groups");
    let min_group = min_group.expect("at least two groups");
    let ds = max_group.percent - min_group.percent;

    Ok(SuccessProfile { threshold, per_group, sdr_overall, max_group, min_group, ds })
}

/// Computes the group success profile of one evaluation cell. The records
/// must belong to a single (run, split, checkpoint) cell.
pub fn group_success_profile(
    records: &[LandmarkRecord],
    threshold: f64,
    normalization: &Normalization,
) -> Result<SuccessProfile, LandmarkError> {
    profile_from_nmes(&group_nmes(records, normalization)?, threshold)
}

/// Scores a method profile against a baseline profile. Both must have been
/// computed at the same threshold.
pub fn compare_landmark(
    baseline: &SuccessProfile,
    method: &SuccessProfile,
) -> Result<ComparisonResult, LandmarkError> {
    if baseline.threshold != method.threshold {
        return Err(LandmarkError::ThresholdMismatch {
            baseline: baseline.threshold,
            method: method.threshold,
        });
    }
    let b = PerformancePoint::new_unchecked(baseline.min_group.percent, baseline.max_group.percent);
    let m = PerformancePoint::new_unchecked(method.min_group.percent, method.max_group.percent);
    Ok(compare_to_baseline(b, m))
}

/// Baseline and method profiles plus their comparison at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub threshold: f64,
    pub baseline: SuccessProfile,
    pub method: SuccessProfile,
    pub comparison: ComparisonResult,
}

/// Default sweep grid: 1% to 10% of the normalization distance in 0.5%
/// steps. Built from integer multiples so the endpoints are exact.
pub fn default_sweep_grid() -> Vec<f64> {
    (2..=20).map(|i| i as f64 * 0.005).collect()
}

fn validate_grid(grid: &[f64]) -> Result<(), LandmarkError> {
    if grid.is_empty() {
        return Err(LandmarkError::BadGrid("must not be empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite() || *t <= 0.0 || *t >= 1.0) {
        return Err(LandmarkError::BadGrid(
            "entries must lie strictly between 0 and 1".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LandmarkError::BadGrid("entries must be strictly ascending".into()));
    }
    Ok(())
}

/// Re-evaluates a baseline/method pair across a whole threshold grid. NMEs
/// are computed once per log; only the success counting is repeated.
pub fn threshold_sweep(
    baseline: &[LandmarkRecord],
    method: &[LandmarkRecord],
    grid: &[f64],
    normalization: &Normalization,
) -> Result<Vec<SweepEntry>, LandmarkError> {
    validate_grid(grid)?;
    let baseline_nmes = group_nmes(baseline, normalization)?;
    let method_nmes = group_nmes(method, normalization)?;
    grid.iter()
        .map(|&threshold| {
            let baseline = profile_from_nmes(&baseline_nmes, threshold)?;
            let method = profile_from_nmes(&method_nmes, threshold)?;
            let comparison = compare_landmark(&baseline, &method)?;
            Ok(SweepEntry { threshold, baseline, method, comparison })
        })
        .collect()
}

/// One method's sweep entries, tagged for multi-method reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub method_id: String,
    pub entries: Vec<SweepEntry>,
}

/// Sweep results for several methods over one shared grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSeries {
    pub thresholds: Vec<f64>,
    pub curves: Vec<SweepCurve>,
}

impl SweepSeries {
    /// Couples curves to their shared grid; every curve must carry exactly
    /// one entry per grid threshold.
    pub fn new(thresholds: Vec<f64>, curves: Vec<SweepCurve>) -> Result<Self, LandmarkError> {
        validate_grid(&thresholds)?;
        for curve in &curves {
            let matches = curve.entries.len() == thresholds.len()
                && curve
                    .entries
                    .iter()
                    .zip(&thresholds)
                    .all(|(e, t)| e.threshold == *t);
            if !matches {
                return Err(LandmarkError::BadGrid(format!(
                    "curve '{}' does not match the shared grid",
                    curve.method_id
                )));
            }
        }
        Ok(SweepSeries { thresholds, curves })
    }
}

/// K stacked score maps over one H x W image, stored plane-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStack {
    height: usize,
    width: usize,
    planes: Vec<Vec<f64>>,
}

impl HeatmapStack {
    /// Wraps row-major planes; every plane must hold `height * width` values.
    pub fn from_planes(
        height: usize,
        width: usize,
        planes: Vec<Vec<f64>>,
    ) -> Result<Self, LandmarkError> {
        for (plane, values) in planes.iter().enumerate() {
            if values.len() != height * width {
                return Err(LandmarkError::BadPlaneShape { plane, height, width });
            }
        }
        Ok(HeatmapStack { height, width, planes })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn k(&self) -> usize {
        self.planes.len()
    }
}

/// Decodes each plane to the coordinates of its maximum: x is the column,
/// y the row. Ties resolve to the smallest row, then the smallest column.
pub fn decode_heatmaps(stack: &HeatmapStack) -> Result<Vec<Point>, LandmarkError> {
    let mut points = Vec::with_capacity(stack.planes.len());
    for (plane, values) in stack.planes.iter().enumerate() {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LandmarkError::NonFiniteHeatmap { plane });
        }
        let mut best = 0usize;
        for (idx, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = idx;
            }
        }
        points.push(Point::new(
            (best % stack.width) as f64,
            (best / stack.width) as f64,
        ));
    }
    Ok(points)
}
