//! Per-group confusion statistics and the group-fairness profile of a
//! classification run: accuracy extremes, accuracy gap, and equalized-odds
//! gaps.
//!
//! All rates are percentages in [0, 100]. Rate definitions:
//!
//! * TPR = TP / (TP + FN), undefined when the group has no positives
//! * FPR = FP / (FP + TN), undefined when the group has no negatives
//! * accuracy = (TP + TN) / total
//!
//! With more than two groups the gap metrics generalize to the worst pair:
//! DA and DEO become the largest pairwise absolute difference, and DEOdds
//! the largest pairwise sum of TPR and FPR differences.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::model::{BenchmarkManifest, ClassificationRecord};

/// Binary confusion counts for one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn correct(&self) -> u64 {
        self.true_pos + self.true_neg
    }

    pub fn positives(&self) -> u64 {
        self.true_pos + self.false_neg
    }

    pub fn negatives(&self) -> u64 {
        self.false_pos + self.true_neg
    }
}

/// Rates derived from one confusion matrix. TPR and FPR are `None` when the
/// group has no positives (respectively negatives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSet {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub acc: f64,
}

/// Confusion counts plus derived rates for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupStats {
    pub confusion: Confusion,
    pub rates: RateSet,
}

/// A percentage tagged with the group it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupValue {
    pub group: String,
    pub percent: f64,
}

/// Group-fairness profile of one evaluation cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupProfile {
    pub per_group: BTreeMap<String, GroupStats>,
    /// Overall accuracy, pooled over all groups.
    pub accuracy: f64,
    /// Best-performing group (MGA).
    pub max_group: GroupValue,
    /// Worst-performing group (mGA).
    pub min_group: GroupValue,
    /// Accuracy gap: MGA - mGA, or the worst pairwise gap for > 2 groups.
    pub da: f64,
    /// Equal-opportunity gap: worst pairwise TPR difference.
    pub deo: f64,
    /// Equalized-odds gap: worst pairwise TPR + FPR difference.
    pub deodds: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("no records to evaluate")]
    EmptyInput,
    #[error("confusion matrix holds no observations")]
    EmptyConfusion,
    #[error("records cover a single group; fairness gaps need at least two")]
    SingleGroup,
    #[error("{rate} is undefined for group '{group}'")]
    UndefinedRate { group: String, rate: &'static str },
}

/// Tallies one confusion matrix per group. `positive_label` selects which
/// of the two label values plays the positive role.
pub fn group_confusion(
    records: &[ClassificationRecord],
    positive_label: u8,
) -> Result<BTreeMap<String, Confusion>, MetricError> {
    if records.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut per_group: BTreeMap<String, Confusion> = BTreeMap::new();
    for rec in records {
        let conf = per_group.entry(rec.group.clone()).or_default();
        let actual_pos = rec.y_true == positive_label;
        let predicted_pos = rec.y_pred == positive_label;
        match (actual_pos, predicted_pos) {
            (true, true) => conf.true_pos += 1,
            (true, false) => conf.false_neg += 1,
            (false, true) => conf.false_pos += 1,
            (false, false) => conf.true_neg += 1,
        }
    }
    Ok(per_group)
}

/// Derives TPR, FPR, and accuracy from one confusion matrix.
pub fn rates(conf: &Confusion) -> Result<RateSet, MetricError> {
    if conf.total() == 0 {
        return Err(MetricError::EmptyConfusion);
    }
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            None
        } else {
            Some(100.0 * num as f64 / den as f64)
        }
    };
    Ok(RateSet {
        tpr: ratio(conf.true_pos, conf.positives()),
        fpr: ratio(conf.false_pos, conf.negatives()),
        acc: 100.0 * conf.correct() as f64 / conf.total() as f64,
    })
}

/// Computes the full fairness profile of one evaluation cell. The records
/// must all belong to the same (run, task, split, checkpoint) cell; callers
/// are responsible for slicing logs accordingly.
///
/// Requires at least two groups, and every group must have both positives
/// and negatives so that the odds gaps are defined. Ties for the accuracy
/// extremes resolve to the lexicographically smallest group label.
pub fn fairness_report(
    records: &[ClassificationRecord],
    manifest: &BenchmarkManifest,
) -> Result<GroupProfile, MetricError> {
    let confusions = group_confusion(records, manifest.positive_label)?;
    if confusions.len() < 2 {
        return Err(MetricError::SingleGroup);
    }

    let mut per_group = BTreeMap::new();
    for (group, conf) in &confusions {
        let rates = rates(conf)?;
        if rates.tpr.is_none() {
            return Err(MetricError::UndefinedRate {
                group: group.clone(),
                rate: "TPR",
            });
        }
        if rates.fpr.is_none() {
            return Err(MetricError::UndefinedRate {
                group: group.clone(),
                rate: "FPR",
            });
        }
        per_group.insert(group.clone(), GroupStats { confusion: *conf, rates });
    }

    let correct: u64 = confusions.values().map(Confusion::correct).sum();
    let total: u64 = confusions.values().map(Confusion::total).sum();
    let accuracy = 100.0 * correct as f64 / total as f64;

    let mut max_group: Option<GroupValue> = None;
    let mut min_group: Option<GroupValue> = None;
    for (group, stats) in &per_group {
        let acc = stats.rates.acc;
        if max_group.as_ref().is_none_or(|m| acc > m.percent) {
            max_group = Some(GroupValue { group: group.clone(), percent: acc });
        }
        if min_group.as_ref().is_none_or(|m| acc < m.percent) {
            min_group = Some(GroupValue { group: group.clone(), percent: acc });
        }
    }
    let max_group = max_group.expect("at least two groups");
    let min_group = min_group.expect("at least two groups");

    let mut da: f64 = 0.0;
    let mut deo: f64 = 0.0;
    let mut deodds: f64 = 0.0;
    let stats: Vec<&GroupStats> = per_group.values().collect();
    for i in 0..stats.len() {
        for j in (i + 1)..stats.len() {
            let (a, b) = (stats[i].rates, stats[j].rates);
            let tpr_gap = (a.tpr.unwrap() - b.tpr.unwrap()).abs();
            let fpr_gap = (a.fpr.unwrap() - b.fpr.unwrap()).abs();
            da = da.max((a.acc - b.acc).abs());
            deo = deo.max(tpr_gap);
            deodds = deodds.max(tpr_gap + fpr_gap);
        }
    }

    Ok(GroupProfile {
        per_group,
        accuracy,
        max_group,
        min_group,
        da,
        deo,
        deodds,
    })
}
