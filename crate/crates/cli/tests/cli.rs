//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fairbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairbench"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).expect("test file writes");
}

const CLASS_SPEC_BASE: &str = r#"{
  "task_kind": "classification",
  "groups": [
    { "group": "Female", "n_pos": 300, "n_neg": 450, "tpr": 0.70, "fpr": 0.20 },
    { "group": "Male", "n_pos": 400, "n_neg": 400, "tpr": 0.90, "fpr": 0.10 }
  ]
}"#;

const CLASS_SPEC_STRONG: &str = r#"{
  "task_kind": "classification",
  "groups": [
    { "group": "Female", "n_pos": 300, "n_neg": 450, "tpr": 0.86, "fpr": 0.12 },
    { "group": "Male", "n_pos": 400, "n_neg": 400, "tpr": 0.92, "fpr": 0.08 }
  ]
}"#;

const CLASS_MANIFEST: &str = r#"{
  "task_kind": "classification",
  "baseline_id": "base",
  "methods": [
    { "method_id": "base", "runs": ["base.csv"] },
    { "method_id": "strong", "runs": ["strong.csv"] }
  ],
  "group_labels": ["Female", "Male"]
}"#;

/// Generates the two classification logs the manifest above points at.
fn classification_workspace() -> TempDir {
    let dir = TempDir::new().expect("tempdir");
    write(dir.path(), "spec_base.json", CLASS_SPEC_BASE);
    write(dir.path(), "spec_strong.json", CLASS_SPEC_STRONG);
    write(dir.path(), "manifest.json", CLASS_MANIFEST);
    for (spec, log, seed) in
        [("spec_base.json", "base.csv", "3"), ("spec_strong.json", "strong.csv", "4")]
    {
        let out = fairbench(dir.path(), &["synth", spec, "--seed", seed]);
        stdout_of(&out);
        fs::rename(dir.path().join("synthetic.csv"), dir.path().join(log)).expect("rename");
    }
    dir
}

const LANDMARK_SPEC_BASE: &str = r#"{
  "task_kind": "landmark",
  "k": 5,
  "groups": [
    { "group": "dark", "n": 100, "noise_scale": 6.0 },
    { "group": "light", "n": 120, "noise_scale": 3.0 }
  ]
}"#;

const LANDMARK_SPEC_STRONG: &str = r#"{
  "task_kind": "landmark",
  "k": 5,
  "groups": [
    { "group": "dark", "n": 100, "noise_scale": 4.0 },
    { "group": "light", "n": 120, "noise_scale": 2.8 }
  ]
}"#;

const LANDMARK_MANIFEST: &str = r#"{
  "task_kind": "landmark",
  "baseline_id": "base",
  "methods": [
    { "method_id": "base", "runs": ["base.jsonl"] },
    { "method_id": "strong", "runs": ["strong.jsonl"] }
  ],
  "group_labels": ["dark", "light"],
  "sdr_threshold": 0.08,
  "normalization": { "fixed": 120.0 }
}"#;

fn landmark_workspace() -> TempDir {
    let dir = TempDir::new().expect("tempdir");
    write(dir.path(), "spec_base.json", LANDMARK_SPEC_BASE);
    write(dir.path(), "spec_strong.json", LANDMARK_SPEC_STRONG);
    write(dir.path(), "manifest.json", LANDMARK_MANIFEST);
    for (spec, log, seed) in
        [("spec_base.json", "base.jsonl", "5"), ("spec_strong.json", "strong.jsonl", "6")]
    {
        let out = fairbench(dir.path(), &["synth", spec, "--seed", seed]);
        stdout_of(&out);
        fs::rename(dir.path().join("synthetic.jsonl"), dir.path().join(log)).expect("rename");
    }
    dir
}

#[test]
fn synth_then_evaluate_round_trips_the_requested_rates() {
    let dir = classification_workspace();
    let out = fairbench(dir.path(), &["evaluate", "base.csv", "--manifest", "manifest.json", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json output");
    assert_eq!(json["task_kind"], "classification");
    let task = &json["tasks"]["synth"];
    // The generator realizes rates exactly: Male accuracy is
    // (0.90 * 400 + 0.90 * 400) / 800 = 90%.
    assert_eq!(task["max_group"]["group"], "Male");
    assert!((task["max_group"]["percent"].as_f64().unwrap() - 90.0).abs() < 1e-9);
    let expected_female = 100.0 * (0.70 * 300.0 + 0.80 * 450.0) / 750.0;
    assert!((task["min_group"]["percent"].as_f64().unwrap() - expected_female).abs() < 1e-9);
}

#[test]
fn compare_reports_relative_metrics_in_json() {
    let dir = classification_workspace();
    let out = fairbench(
        dir.path(),
        &["compare", "base.csv", "strong.csv", "--manifest", "manifest.json", "--json"],
    );
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json output");
    let cmp = &json["tasks"]["synth"];
    assert!(cmp["sigma_hf"].as_f64().unwrap() > 0.5);
    assert!(cmp["delta_dto"].as_f64().unwrap() > 0.0);
    assert!(cmp["hf"].as_f64().unwrap() > 50.0);
}

#[test]
fn rank_writes_a_deterministic_table() {
    let dir = classification_workspace();
    let args = ["rank", "--manifest", "manifest.json", "--out", "out"];
    let first = stdout_of(&fairbench(dir.path(), &args));
    let first_file = fs::read_to_string(dir.path().join("out/rank.md")).expect("rank.md");
    assert_eq!(first, first_file);
    assert!(first.starts_with("| Method | Acc. | MGA | mGA | DA | DEO | DEOdds |"));
    assert!(first.contains("| base |"));
    assert!(first.contains("**"), "best method cells are bolded");

    // A second run over the same inputs reproduces the bytes even though
    // cells evaluate concurrently.
    let second = stdout_of(&fairbench(dir.path(), &args));
    assert_eq!(first, second);
    assert_eq!(first_file, fs::read_to_string(dir.path().join("out/rank.md")).unwrap());
}

#[test]
fn rank_format_flag_overrides_the_manifest() {
    let dir = classification_workspace();
    let out = fairbench(
        dir.path(),
        &["rank", "--manifest", "manifest.json", "--format", "csv", "--out", "out"],
    );
    let text = stdout_of(&out);
    assert!(text.starts_with("method_id,acc,max_group,min_group,da,deo,deodds,delta_dto,sigma_hf,sigma_hf_std,"));
    assert!(dir.path().join("out/rank.csv").exists());
    assert!(!dir.path().join("out/rank.md").exists());
}

#[test]
fn rank_json_parses_and_keeps_manifest_method_order() {
    let dir = classification_workspace();
    let out = fairbench(
        dir.path(),
        &["rank", "--manifest", "manifest.json", "--key", "delta_dto", "--json"],
    );
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json output");
    assert_eq!(json["key"], "delta_dto");
    assert_eq!(json["baseline"]["method_id"], "base");
    assert_eq!(json["rows"][0]["method_id"], "strong");
}

#[test]
fn landmark_sweep_emits_csv_and_svg_deterministically() {
    let dir = landmark_workspace();
    let args = ["sweep", "--manifest", "manifest.json", "--out", "out", "--grid", "0.02:0.12:0.02"];
    let first = stdout_of(&fairbench(dir.path(), &args));
    assert!(first.starts_with("method_id,threshold,mgs,m_gs,ds,hf,sigma_hf,delta_dto\n"));
    // 6 grid points for the single non-baseline method, plus the header.
    assert_eq!(first.lines().count(), 7);
    assert!(first.lines().nth(1).unwrap().starts_with("strong,0.02,"));

    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).expect("sweep.csv");
    assert_eq!(first, csv);
    let svg = fs::read_to_string(dir.path().join("out/sweep.svg")).expect("sweep.svg");
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    stdout_of(&fairbench(dir.path(), &args));
    assert_eq!(svg, fs::read_to_string(dir.path().join("out/sweep.svg")).unwrap());
}

#[test]
fn sweep_rejects_classification_manifests() {
    let dir = classification_workspace();
    let out = fairbench(dir.path(), &["sweep", "--manifest", "manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("landmark"));
}

#[test]
fn isolines_reports_the_hf_surface_around_the_baseline() {
    let dir = landmark_workspace();
    let out = fairbench(
        dir.path(),
        &["isolines", "--manifest", "manifest.json", "--resolution", "11", "--out", "out"],
    );
    let text = stdout_of(&out);
    assert!(text.starts_with("min_group,max_group,hf\n"));
    // Feasible cells only: 11x11 grid keeps the min <= max triangle.
    assert_eq!(text.lines().count(), 1 + (11 * 12) / 2);
    assert_eq!(text, fs::read_to_string(dir.path().join("out/isolines.csv")).unwrap());
}

#[test]
fn select_picks_the_checkpoint_with_the_best_worst_group() {
    let dir = TempDir::new().expect("tempdir");
    write(dir.path(), "manifest.json", CLASS_MANIFEST);
    let mut log = String::from("sample_id,y_true,y_pred,score,group,run_id,task_id,split,checkpoint\n");
    // Checkpoint 100 leaves Female at 50% accuracy; checkpoint 200 fixes it.
    for (ckpt, female_hits) in [(100u32, 2), (200, 3)] {
        for i in 0..4 {
            let pred = if i < female_hits { 1 } else { 0 };
            log.push_str(&format!("f{ckpt}p{i},1,{pred},,Female,r0,synth,val,{ckpt}\n"));
            log.push_str(&format!("f{ckpt}n{i},0,0,,Female,r0,synth,val,{ckpt}\n"));
            log.push_str(&format!("m{ckpt}p{i},1,1,,Male,r0,synth,val,{ckpt}\n"));
            log.push_str(&format!("m{ckpt}n{i},0,0,,Male,r0,synth,val,{ckpt}\n"));
        }
    }
    write(dir.path(), "val.csv", &log);

    let out = fairbench(dir.path(), &["select", "val.csv", "--manifest", "manifest.json", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json output");
    assert_eq!(json["checkpoint"], 200);
    let expected = 100.0 * 7.0 / 8.0;
    assert!((json["min_group"].as_f64().unwrap() - expected).abs() < 1e-9);

    let text = stdout_of(&fairbench(dir.path(), &["select", "val.csv", "--manifest", "manifest.json"]));
    assert_eq!(text.trim(), "checkpoint 200 (worst group 87.50)");
}

#[test]
fn select_requires_validation_records() {
    let dir = classification_workspace();
    // Synthetic logs only contain test-split rows.
    let out = fairbench(dir.path(), &["select", "base.csv", "--manifest", "manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("no val-split records"));
}

#[test]
fn missing_manifest_is_an_input_error() {
    let dir = TempDir::new().expect("tempdir");
    let out = fairbench(dir.path(), &["rank", "--manifest", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).starts_with("error: cannot read manifest"));
}

#[test]
fn invalid_manifest_lists_every_violation() {
    let dir = TempDir::new().expect("tempdir");
    write(
        dir.path(),
        "manifest.json",
        r#"{
  "task_kind": "classification",
  "baseline_id": "ghost",
  "methods": [{ "method_id": "base", "runs": [] }],
  "group_labels": []
}"#,
    );
    let out = fairbench(dir.path(), &["rank", "--manifest", "manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = stderr_of(&out);
    assert!(stderr.contains("ghost"), "names the unknown baseline: {stderr}");
    assert!(stderr.matches("\n  - ").count() >= 2, "one line per violation: {stderr}");
}

#[test]
fn malformed_log_reports_the_line() {
    let dir = TempDir::new().expect("tempdir");
    write(dir.path(), "manifest.json", CLASS_MANIFEST);
    write(
        dir.path(),
        "base.csv",
        "sample_id,y_true,group,run_id,task_id,split\ns0,1,Female,r0,synth,test\n",
    );
    let out = fairbench(dir.path(), &["evaluate", "base.csv", "--manifest", "manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    // Neither y_pred nor score present: the parser names what is missing.
    assert!(stderr_of(&out).contains("y_pred"));
}

#[test]
fn threshold_flag_rebins_scored_logs() {
    let dir = TempDir::new().expect("tempdir");
    write(dir.path(), "manifest.json", CLASS_MANIFEST);
    let mut log = String::from("sample_id,y_true,score,group,run_id,task_id,split\n");
    for (i, score) in [0.30, 0.55, 0.80, 0.95].iter().enumerate() {
        log.push_str(&format!("f{i},1,{score},Female,r0,synth,test\n"));
        log.push_str(&format!("m{i},1,{score},Male,r0,synth,test\n"));
        log.push_str(&format!("fn{i},0,0.05,Female,r0,synth,test\n"));
        log.push_str(&format!("mn{i},0,0.05,Male,r0,synth,test\n"));
    }
    write(dir.path(), "scored.csv", &log);

    let low = stdout_of(&fairbench(
        dir.path(),
        &["evaluate", "scored.csv", "--manifest", "manifest.json", "--threshold", "0.5", "--json"],
    ));
    let high = stdout_of(&fairbench(
        dir.path(),
        &["evaluate", "scored.csv", "--manifest", "manifest.json", "--threshold", "0.9", "--json"],
    ));
    let acc = |text: &str| {
        let json: serde_json::Value = serde_json::from_str(text).unwrap();
        json["tasks"]["synth"]["accuracy"].as_f64().unwrap()
    };
    // 3 of 4 positives clear 0.5, only 1 clears 0.9.
    assert!((acc(&low) - 100.0 * 7.0 / 8.0).abs() < 1e-9);
    assert!((acc(&high) - 100.0 * 5.0 / 8.0).abs() < 1e-9);
}
