//! Baseline-relative scoring. A method's group-accuracy profile is reduced
//! to a point (worst group, best group) and judged against the baseline's
//! point along two axes at once: how much the gap between groups shrank and
//! how much the best group gained.
//!
//! The two improvements are combined by a harmonic mean after shifting each
//! term by +100 to make it non-negative:
//!
//! ```text
//! HF = (dgap + 100)(dmax + 100) / ((dgap + 100) + (dmax + 100))
//! ```
//!
//! HF lives in [0, 100]; 50 marks "no change over the baseline". A method
//! that improves either axis without hurting the other lands above 50. The
//! sigmoid rescale maps HF into (0, 1) with the neutral point at 0.5 and
//! saturates quickly, which makes scores comparable across benchmarks.
//!
//! DTO is the older single-number view: Euclidean distance from the point
//! to the utopia corner (100, 100), where less is better.

use serde::Serialize;

/// A feasible (worst group, best group) percentage pair. Construction
/// enforces 0 <= min <= max <= 100, so downstream math never sees an
/// infeasible point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerformancePoint {
    min_group: f64,
    max_group: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelativeError {
    #[error("({min_group}, {max_group}) is not a feasible performance point")]
    InfeasiblePoint { min_group: f64, max_group: f64 },
    #[error("isoline grid needs a resolution of at least 2, got {0}")]
    BadResolution(usize),
}

impl PerformancePoint {
    pub fn new(min_group: f64, max_group: f64) -> Result<Self, RelativeError> {
        let feasible = min_group.is_finite()
            && max_group.is_finite()
            && 0.0 <= min_group
            && min_group <= max_group
            && max_group <= 100.0;
        if feasible {
            Ok(PerformancePoint { min_group, max_group })
        } else {
            Err(RelativeError::InfeasiblePoint { min_group, max_group })
        }
    }

    /// For internal call sites where feasibility already holds structurally.
    pub(crate) fn new_unchecked(min_group: f64, max_group: f64) -> Self {
        debug_assert!(0.0 <= min_group && min_group <= max_group && max_group <= 100.0);
        PerformancePoint { min_group, max_group }
    }

    pub fn min_group(self) -> f64 {
        self.min_group
    }

    pub fn max_group(self) -> f64 {
        self.max_group
    }

    /// Spread between the best and worst group.
    pub fn gap(self) -> f64 {
        self.max_group - self.min_group
    }
}

/// Everything one baseline-vs-method comparison produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonResult {
    /// Gap reduction: baseline gap minus method gap. Positive is better.
    pub delta_gap: f64,
    /// Best-group gain: method max minus baseline max. Positive is better.
    pub delta_max: f64,
    pub hf: f64,
    pub sigma_hf: f64,
    pub dto_baseline: f64,
    pub dto_method: f64,
    /// Distance-to-optimum reduction. Positive is better.
    pub delta_dto: f64,
}

/// Euclidean distance from the point to the (100, 100) utopia corner.
pub fn compute_dto(point: PerformancePoint) -> f64 {
    let dmin = 100.0 - point.min_group();
    let dmax = 100.0 - point.max_group();
    (dmin * dmin + dmax * dmax).sqrt()
}

/// Shifted harmonic mean of the two improvement terms. Each term is at
/// least -100, so both shifted factors are non-negative; when both are 0
/// the mean degenerates to 0.
fn harmonic_fairness(delta_gap: f64, delta_max: f64) -> f64 {
    let a = delta_gap + 100.0;
    let b = delta_max + 100.0;
    if a + b == 0.0 {
        return 0.0;
    }
    a * b / (a + b)
}

/// Maps HF into (0, 1) with the no-change score 50 landing exactly on 0.5.
pub fn sigmoid_rescale(hf: f64) -> f64 {
    1.0 / (1.0 + (50.0 - hf).exp())
}

/// Scores `method` against `baseline`. Comparing a point against itself
/// yields exactly HF = 50, sigma = 0.5, and delta_dto = 0.
pub fn compare_to_baseline(
    baseline: PerformancePoint,
    method: PerformancePoint,
) -> ComparisonResult {
    let delta_gap = baseline.gap() - method.gap();
    let delta_max = method.max_group() - baseline.max_group();
    let hf = harmonic_fairness(delta_gap, delta_max);
    let dto_baseline = compute_dto(baseline);
    let dto_method = compute_dto(method);
    ComparisonResult {
        delta_gap,
        delta_max,
        hf,
        sigma_hf: sigmoid_rescale(hf),
        dto_baseline,
        dto_method,
        delta_dto: dto_baseline - dto_method,
    }
}

/// One grid cell of an isoline map. `hf` is `None` where min > max makes
/// the cell infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolineCell {
    pub min_group: f64,
    pub max_group: f64,
    pub hf: Option<f64>,
}

/// HF evaluated on a regular grid of candidate (min, max) points against a
/// fixed baseline, for contour plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsolineGrid {
    pub baseline: PerformancePoint,
    /// Shared axis coordinates, `resolution` evenly spaced values in [0, 100].
    pub coords: Vec<f64>,
    /// Row-major over (min index, max index).
    pub cells: Vec<IsolineCell>,
}

/// Evaluates HF against `baseline` over a `resolution` x `resolution` grid.
pub fn hf_isoline_grid(
    baseline: PerformancePoint,
    resolution: usize,
) -> Result<IsolineGrid, RelativeError> {
    if resolution < 2 {
        return Err(RelativeError::BadResolution(resolution));
    }
    let coords: Vec<f64> = (0..resolution)
        .map(|i| 100.0 * i as f64 / (resolution - 1) as f64)
        .collect();
    let mut cells = Vec::with_capacity(resolution * resolution);
    for &min_group in &coords {
        for &max_group in &coords {
            let hf = if min_group <= max_group {
                let point = PerformancePoint::new_unchecked(min_group, max_group);
                Some(compare_to_baseline(baseline, point).hf)
            } else {
                None
            };
            cells.push(IsolineCell { min_group, max_group, hf });
        }
    }
    Ok(IsolineGrid { baseline, coords, cells })
}
