//! Synthetic prediction logs with exactly-controlled group statistics, and
//! an independent brute-force oracle for cross-checking the metric path.
//!
//! Generation is exact-count: a target rate like tpr = 0.75 over 4
//! positives is realized as exactly 3 true positives (round half up), not
//! sampled. Expected metrics therefore hold as equalities, which is what
//! makes the generated logs usable as test fixtures.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::classify::{Confusion, GroupProfile, GroupStats, GroupValue, MetricError, RateSet};
use crate::model::{ClassificationRecord, LandmarkRecord, Point, Split};

/// Target confusion statistics for one synthetic group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group: String,
    pub n_pos: u64,
    pub n_neg: u64,
    /// Realized as exactly round(tpr * n_pos) true positives.
    pub tpr: f64,
    /// Realized as exactly round(fpr * n_neg) false positives.
    pub fpr: f64,
}

/// Size and noise level for one synthetic landmark group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkGroupSpec {
    pub group: String,
    pub n: u64,
    /// Per-coordinate Gaussian std of the prediction error, in pixels.
    pub noise_scale: f64,
}

/// A synthetic log request, as accepted by the `synth` CLI subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task_kind", rename_all = "lowercase")]
pub enum SynthSpec {
    Classification { groups: Vec<GroupSpec> },
    Landmark { groups: Vec<LandmarkGroupSpec>, k: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("spec lists no groups")]
    EmptySpec,
    #[error("group '{group}' is degenerate: {reason}")]
    DegenerateSpec { group: String, reason: String },
}

fn degenerate(group: &str, reason: impl Into<String>) -> SynthError {
    SynthError::DegenerateSpec { group: group.into(), reason: reason.into() }
}

fn check_unique<'a>(labels: impl Iterator<Item = &'a str>) -> Result<(), SynthError> {
    let mut seen = std::collections::BTreeSet::new();
    for label in labels {
        if !seen.insert(label) {
            return Err(degenerate(label, "specified more than once"));
        }
    }
    Ok(())
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Generates a classification log whose per-group confusion matrices match
/// the specs exactly. Records are shuffled by `seed`; the same seed always
/// produces the same log.
pub fn generate_classification(
    specs: &[GroupSpec],
    seed: u64,
) -> Result<Vec<ClassificationRecord>, SynthError> {
    if specs.is_empty() {
        return Err(SynthError::EmptySpec);
    }
    check_unique(specs.iter().map(|s| s.group.as_str()))?;
    for spec in specs {
        if spec.n_pos + spec.n_neg == 0 {
            return Err(degenerate(&spec.group, "n_pos + n_neg must be > 0"));
        }
        for (field, value) in [("tpr", spec.tpr), ("fpr", spec.fpr)] {
            if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                return Err(degenerate(&spec.group, format!("{field} = {value} not in [0, 1]")));
            }
        }
    }

    let mut records = Vec::new();
    let mut push = |n: u64, y_true: u8, y_pred: u8, group: &str, idx: &mut u64| {
        for _ in 0..n {
            records.push(ClassificationRecord {
                sample_id: format!("s{:05}", *idx),
                y_true,
                y_pred,
                score: None,
                group: group.into(),
                run_id: "r0".into(),
                task_id: "synth".into(),
                split: Split::Test,
                checkpoint: None,
            });
            *idx += 1;
        }
    };

    let mut idx = 0u64;
    for spec in specs {
        let tp = round_half_up(spec.tpr * spec.n_pos as f64);
        let fp = round_half_up(spec.fpr * spec.n_neg as f64);
        push(tp, 1, 1, &spec.group, &mut idx);
        push(spec.n_pos - tp, 1, 0, &spec.group, &mut idx);
        push(fp, 0, 1, &spec.group, &mut idx);
        push(spec.n_neg - fp, 0, 0, &spec.group, &mut idx);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    Ok(records)
}

/// K template landmarks spread over a circle, shared by every generated
/// record.
fn template(k: usize) -> Vec<Point> {
    (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            Point::new(100.0 + 50.0 * angle.cos(), 100.0 + 50.0 * angle.sin())
        })
        .collect()
}

/// Generates a landmark log: ground truth on a fixed template, predictions
/// displaced by per-group Gaussian noise. Deterministic per seed.
pub fn generate_landmark(
    groups: &[LandmarkGroupSpec],
    k: usize,
    seed: u64,
) -> Result<Vec<LandmarkRecord>, SynthError> {
    if groups.is_empty() {
        return Err(SynthError::EmptySpec);
    }
    check_unique(groups.iter().map(|s| s.group.as_str()))?;
    for spec in groups {
        if spec.n == 0 {
            return Err(degenerate(&spec.group, "n must be > 0"));
        }
        if !(spec.noise_scale.is_finite() && spec.noise_scale >= 0.0) {
            return Err(degenerate(
                &spec.group,
                format!("noise_scale = {} must be >= 0", spec.noise_scale),
            ));
        }
    }
    if k == 0 {
        return Err(degenerate(&groups[0].group, "k must be >= 1"));
    }

    let gt = template(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut idx = 0u64;
    for spec in groups {
        let noise = Normal::new(0.0, spec.noise_scale)
            .expect("noise_scale validated as finite and non-negative");
        for _ in 0..spec.n {
            let pred: Vec<Point> = gt
                .iter()
                .map(|p| Point::new(p.x + noise.sample(&mut rng), p.y + noise.sample(&mut rng)))
                .collect();
            records.push(LandmarkRecord {
                sample_id: format!("s{idx:05}"),
                group: spec.group.clone(),
                pred,
                gt: gt.clone(),
                norm: None,
                run_id: "r0".into(),
                split: Split::Test,
                checkpoint: None,
            });
            idx += 1;
        }
    }
    records.shuffle(&mut rng);
    Ok(records)
}

/// Brute-force fairness profile, deliberately sharing no computation with
/// `classify::fairness_report`: groups are collected by scanning, each count
/// is a fresh pass over the records, and the gap metrics come from extreme
/// values rather than pairwise folds. Used to cross-check the real path.
pub fn oracle_report(
    records: &[ClassificationRecord],
    positive_label: u8,
) -> Result<GroupProfile, MetricError> {
    if records.is_empty() {
        return Err(MetricError::EmptyInput);
    }

    let mut groups: Vec<String> = records.iter().map(|r| r.group.clone()).collect();
    groups.sort();
    groups.dedup();
    if groups.len() < 2 {
        return Err(MetricError::SingleGroup);
    }

    let count = |group: &str, pred: Option<bool>, actual: bool| -> u64 {
        records
            .iter()
            .filter(|r| r.group == group)
            .filter(|r| (r.y_true == positive_label) == actual)
            .filter(|r| pred.is_none_or(|p| (r.y_pred == positive_label) == p))
            .count() as u64
    };

    let mut per_group = BTreeMap::new();
    let mut accs = Vec::new();
    let mut tprs = Vec::new();
    let mut fprs = Vec::new();
    for group in &groups {
        let n_pos = count(group, None, true);
        let n_neg = count(group, None, false);
        if n_pos == 0 {
            return Err(MetricError::UndefinedRate { group: group.clone(), rate: "TPR" });
        }
        if n_neg == 0 {
            return Err(MetricError::UndefinedRate { group: group.clone(), rate: "FPR" });
        }
        let tp = count(group, Some(true), true);
        let fp = count(group, Some(true), false);
        let tn = count(group, Some(false), false);
        let fn_ = count(group, Some(false), true);

        let tpr = 100.0 * tp as f64 / n_pos as f64;
        let fpr = 100.0 * fp as f64 / n_neg as f64;
        let acc = 100.0 * (tp + tn) as f64 / (n_pos + n_neg) as f64;
        accs.push((acc, group.clone()));
        tprs.push(tpr);
        fprs.push(fpr);
        per_group.insert(
            group.clone(),
            GroupStats {
                confusion: Confusion {
                    true_pos: tp,
                    false_pos: fp,
                    true_neg: tn,
                    false_neg: fn_,
                },
                rates: RateSet { tpr: Some(tpr), fpr: Some(fpr), acc },
            },
        );
    }

    let correct = records
        .iter()
        .filter(|r| (r.y_true == positive_label) == (r.y_pred == positive_label))
        .count() as u64;
    let accuracy = 100.0 * correct as f64 / records.len() as f64;

    // Extremes scanned in ascending group order; first wins on ties, which
    // matches the metric path's tie-break.
    let mut max_i = 0;
    let mut min_i = 0;
    for i in 1..accs.len() {
        if accs[i].0 > accs[max_i].0 {
            max_i = i;
        }
        if accs[i].0 < accs[min_i].0 {
            min_i = i;
        }
    }
    let da = accs[max_i].0 - accs[min_i].0;

    let spread = |values: &[f64]| {
        let mut lo = values[0];
        let mut hi = values[0];
        for &v in &values[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };
    let deo = spread(&tprs);
    let mut deodds: f64 = 0.0;
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            deodds = deodds.max((tprs[i] - tprs[j]).abs() + (fprs[i] - fprs[j]).abs());
        }
    }

    Ok(GroupProfile {
        per_group,
        accuracy,
        max_group: GroupValue { group: accs[max_i].1.clone(), percent: accs[max_i].0 },
        min_group: GroupValue { group: accs[min_i].1.clone(), percent: accs[min_i].0 },
        da,
        deo,
        deodds,
    })
}
