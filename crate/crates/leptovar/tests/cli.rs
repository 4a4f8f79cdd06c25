//! End-to-end tests of the `leptovar` binary: flags, formats and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leptovar"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn emit_panel(dir: &Path) -> PathBuf {
    let path = dir.join("table1.csv");
    let out = run(&["paper-demo", "--emit-csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    path
}

#[test]
fn describe_prints_stats_for_the_panel() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&["describe", "--input", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("count"), "{text}");
    assert!(text.contains("8.000000"), "{text}");
    assert!(text.contains("0.625000"), "{text}");
    assert!(text.contains("correlations"), "{text}");
}

#[test]
fn describe_missing_file_is_a_data_error() {
    let out = run(&["describe", "--input", "/no/such/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("file not found"), "{}", stderr(&out));
}

#[test]
fn describe_rejects_dot_format() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&["describe", "--input", csv.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fit_dot_shows_the_published_root_split() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f1,f2",
        "--depth",
        "2",
        "--format",
        "dot",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("f1 < 4.9"), "{}", stdout(&out));
}

#[test]
fn fit_reports_the_f2_residual() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f2",
        "--depth",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // Depth-1 residual on f2 alone is 1.609375.
    assert!(stdout(&out).contains("residual_mse=1.609375"), "{}", stdout(&out));
}

#[test]
fn fit_depth_zero_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f1",
        "--depth",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("depth must be >= 1"), "{}", stderr(&out));
}

#[test]
fn fit_unknown_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "nope",
        "--features",
        "f1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown column"), "{}", stderr(&out));
}

#[test]
fn fit_json_is_parseable_and_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f1,f2",
        "--depth",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let nodes = parsed["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 7);
    assert_eq!(nodes[0]["mse"].as_f64().unwrap(), 3.171875);
}

#[test]
fn lepto_prints_the_exact_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "lepto",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--depth",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("0.921875"), "{text}");
    assert!(text.contains("0.125000"), "{text}");
    assert!(text.contains("3.046875"), "{text}");
    assert!(text.contains("70.94%"), "{text}");
}

#[test]
fn lepto_of_constant_column_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    std::fs::write(&path, "a,const\n1,5\n2,5\n3,5\n").unwrap();
    let out = run(&[
        "lepto",
        "--input",
        path.to_str().unwrap(),
        "--target",
        "const",
        "--depth",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("total variance: 0.000000"), "{text}");
}

#[test]
fn rank_orders_f1_above_f2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "rank",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--sets",
        "f1;f2;f1,f2",
        "--depth",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let results = parsed["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    let order: Vec<String> = results
        .iter()
        .map(|r| {
            r["feature_names"]
                .as_array()
                .unwrap()
                .iter()
                .map(|n| n.as_str().unwrap())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let pos = |name: &str| order.iter().position(|o| o == name).unwrap();
    assert!(pos("f1") < pos("f2"), "order {order:?}");
    let fractions: Vec<f64> = results
        .iter()
        .map(|r| r["macro_fraction_explained"].as_f64().unwrap())
        .collect();
    assert!(fractions.windows(2).all(|w| w[0] >= w[1]), "{fractions:?}");
    // f1 explains ~77.82% of the 1-bit macro-variance.
    assert!((fractions[0] - 0.7782407407407407).abs() < 1e-9);
}

#[test]
fn rank_text_contains_percentages() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "rank",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--sets",
        "f1;f2",
        "--depth",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("77.82%"), "{text}");
    assert!(text.contains("1.42"), "{text}");
}

#[test]
fn rank_unknown_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = run(&[
        "rank",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--sets",
        "nope",
        "--depth",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_degenerate_target_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    std::fs::write(&path, "a,const\n1,5\n2,5\n3,5\n").unwrap();
    let out = run(&[
        "rank",
        "--input",
        path.to_str().unwrap(),
        "--target",
        "const",
        "--sets",
        "a",
        "--depth",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degenerate target"), "{}", stderr(&out));
}

#[test]
fn verify_passes_with_seeded_trials() {
    let out = run(&["verify", "--trials", "40", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"), "{}", stdout(&out));
}

#[test]
fn verify_zero_trials_trivially_passes() {
    let out = run(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn verify_conjecture_sweep_is_stable_json() {
    let args = [
        "verify",
        "--conjecture",
        "--n",
        "6",
        "--depth",
        "2",
        "--trials",
        "25",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(parsed["trials"], 25);
    assert_eq!(parsed["seed"], 7);
    assert!(parsed["counterexamples"].is_u64());
}

#[test]
fn paper_demo_reproduces_published_lines() {
    let out = run(&["paper-demo"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("info gain 70.94%"), "{text}");
    assert!(text.contains("greedy 0.125 / optimal 0.000"), "{text}");
    assert!(text.contains("all reference values reproduced"), "{text}");
}

#[test]
fn paper_demo_json_is_green() {
    let out = run(&["paper-demo", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["passed"], true);
    assert!(parsed["checks"].as_array().unwrap().len() >= 18);
}

#[test]
fn emitted_csv_round_trips_through_describe() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let content = std::fs::read_to_string(&csv).unwrap();
    assert!(content.starts_with("t,f1,f2,y\n"), "{content}");
    // 17-significant-digit cells parse back to the exact panel.
    let out = run(&["describe", "--input", csv.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let columns = parsed["columns"].as_array().unwrap();
    assert_eq!(columns.len(), 4);
    assert_eq!(columns[3]["mean"].as_f64().unwrap(), 0.625);
}

#[test]
fn output_goes_to_a_file_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let target = dir.path().join("tree.dot");
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f1",
        "--depth",
        "1",
        "--format",
        "dot",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.contains("f1 < 4.9"));
}

#[test]
fn thread_cap_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let csv = emit_panel(dir.path());
    let out = bin()
        .env("LEPTOVAR_THREADS", "1")
        .args([
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--target",
            "y",
            "--features",
            "f1,f2",
            "--depth",
            "2",
            "--format",
            "json",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    // Identical output to the default-parallelism run.
    let parallel = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--target",
        "y",
        "--features",
        "f1,f2",
        "--depth",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(stdout(&out), stdout(&parallel));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}
