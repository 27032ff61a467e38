//! Shared workload builders for the criterion benches.

use fairbench_core::{
    generate_classification, generate_landmark, BenchmarkManifest, ClassificationRecord,
    GroupSpec, LandmarkGroupSpec, LandmarkRecord, MethodSpec, Normalization, RenderOptions,
    TaskKind,
};

/// A two-group classification log with `n` records split 60/40 across groups.
pub fn classification_log(n: u64, seed: u64) -> Vec<ClassificationRecord> {
    let groups = vec![
        GroupSpec {
            group: "a".into(),
            n_pos: n * 3 / 10,
            n_neg: n * 3 / 10,
            tpr: 0.72,
            fpr: 0.18,
        },
        GroupSpec {
            group: "b".into(),
            n_pos: n / 5,
            n_neg: n / 5,
            tpr: 0.91,
            fpr: 0.07,
        },
    ];
    generate_classification(&groups, seed).expect("valid spec")
}

/// A two-group landmark log with `n` records of `k` points each.
pub fn landmark_log(n: u64, k: usize, seed: u64) -> Vec<LandmarkRecord> {
    let groups = vec![
        LandmarkGroupSpec { group: "a".into(), n: n / 2, noise_scale: 5.5 },
        LandmarkGroupSpec { group: "b".into(), n: n - n / 2, noise_scale: 3.0 },
    ];
    generate_landmark(&groups, k, seed).expect("valid spec")
}

/// Manifest matching the logs above.
pub fn manifest(task_kind: TaskKind) -> BenchmarkManifest {
    BenchmarkManifest {
        task_kind,
        baseline_id: "base".into(),
        methods: vec![
            MethodSpec { method_id: "base".into(), runs: vec!["base".into()] },
            MethodSpec { method_id: "m".into(), runs: vec!["m".into()] },
        ],
        group_labels: vec!["a".into(), "b".into()],
        positive_label: 1,
        score_threshold: 0.5,
        sdr_threshold: 0.08,
        sweep_grid: None,
        normalization: Normalization::Fixed(120.0),
        output: RenderOptions::default(),
    }
}
