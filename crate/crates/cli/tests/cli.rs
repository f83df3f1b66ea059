//! End-to-end tests of the `wigner` binary: golden outputs, determinism,
//! exit codes and the CSV surfaces.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wigner"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let output = run(args);
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 stdout")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(fixture(&format!("golden/{name}"))).expect("golden file exists")
}

#[test]
fn derive_matches_golden_and_exits_zero() {
    let output = run(&["derive"]);
    assert!(output.status.success());
    assert_eq!(String::from_utf8_lossy(&output.stdout), golden("derive.json"));
}

#[test]
fn analyze_reproduction_matches_golden() {
    let path = fixture("oam100_reproduction.toml");
    let stdout = stdout_of(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(stdout, golden("analyze_reproduction.json"));
}

#[test]
fn analyze_computed_matches_golden() {
    let path = fixture("oam100_counts.toml");
    let stdout = stdout_of(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(stdout, golden("analyze_computed.json"));
}

#[test]
fn analyze_cli_overrides_match_embedded_overrides() {
    let plain = fixture("oam100_counts.toml");
    let with_flags = stdout_of(&[
        "analyze",
        "--input",
        plain.to_str().unwrap(),
        "--p-min",
        "0.002",
        "--p-max",
        "0.043",
    ]);
    let value: serde_json::Value = serde_json::from_str(&with_flags).unwrap();
    assert_eq!(value["p_source"], "override");
    let violation = value["violation"].as_f64().unwrap();
    assert!((violation - 369.88).abs() < 0.01);
}

#[test]
fn census_perfect_matches_golden() {
    let stdout = stdout_of(&["census", "--universe", "perfect", "--no-timing"]);
    assert_eq!(stdout, golden("census_perfect.json"));
}

#[test]
fn adversary_matches_golden() {
    let stdout = stdout_of(&["adversary", "--extra", "0.2"]);
    assert_eq!(stdout, golden("adversary.json"));
}

#[test]
fn montecarlo_stream_is_pinned_by_golden() {
    let stdout = stdout_of(&["montecarlo", "--samples", "100", "--seed", "0", "--no-timing"]);
    assert_eq!(stdout, golden("montecarlo_100_seed0.json"));
}

#[test]
fn identical_invocations_emit_identical_bytes() {
    let reproduction = fixture("oam100_reproduction.toml");
    let commands: Vec<Vec<&str>> = vec![
        vec!["derive"],
        vec!["quantum", "--scan-step", "5"],
        vec!["slitwheel", "--l", "10", "--slit-width", "0.149"],
        vec!["analyze", "--input", reproduction.to_str().unwrap()],
        vec!["census", "--universe", "perfect", "--no-timing"],
        vec!["census", "--universe", "grouped", "--no-timing"],
        vec!["montecarlo", "--samples", "200", "--seed", "31", "--no-timing"],
        vec!["adversary", "--extra", "0.3"],
    ];
    for args in commands {
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?} not byte-identical");
    }
}

#[test]
fn missing_input_file_exits_one_with_context() {
    let output = run(&["analyze", "--input", "/nonexistent/file.toml"]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("/nonexistent/file.toml"), "{stderr}");
}

#[test]
fn invalid_flags_exit_one() {
    let output = run(&["census", "--universe", "bogus"]);
    assert_eq!(output.status.code(), Some(1));
    let output = run(&["montecarlo", "--samples", "0"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn csv_dataset_parses_like_toml() {
    let dir = std::env::temp_dir().join("wigner-cli-test-csv");
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("dataset.csv");
    std::fs::write(
        &csv_path,
        "counts.i13,5654\ncounts.i12,2202\ncounts.i23,2456\ncounts.i_min,991\n\
         counts.i_max,7845\nwheel.l,100\nwheel.slit_width_fraction,0.149\n\
         angles.phi1,0.0\nangles.phi2,0.3\nangles.phi3,0.6\n\
         overrides.p_min,0.002\noverrides.p_max,0.043\n",
    )
    .unwrap();
    let from_csv = stdout_of(&["analyze", "--input", csv_path.to_str().unwrap()]);
    let value: serde_json::Value = serde_json::from_str(&from_csv).unwrap();
    assert!((value["violation"].as_f64().unwrap() - 369.88).abs() < 0.01);
}

#[test]
fn slitwheel_writes_fringe_csv() {
    let dir = std::env::temp_dir().join("wigner-cli-test-fringe");
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("fringe.csv");
    let stdout = stdout_of(&[
        "slitwheel",
        "--l",
        "100",
        "--slit-width",
        "0.149",
        "--fringe-csv",
        csv_path.to_str().unwrap(),
        "--fringe-points",
        "5",
    ]);
    let value: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["fringe"]["points"], 5);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("phi_o_rad,probability"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn quantum_defaults_report_the_maximal_violation_angles() {
    let stdout = stdout_of(&["quantum"]);
    let value: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(value["evaluation"]["satisfied"], false);
    assert!((value["evaluation"]["lhs"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((value["evaluation"]["rhs"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn one_step_census_shards_agree() {
    let single = stdout_of(&["census", "--universe", "one-step", "--no-timing", "--shards", "1"]);
    let sharded = stdout_of(&["census", "--universe", "one-step", "--no-timing", "--shards", "8"]);
    let single: serde_json::Value = serde_json::from_str(&single).unwrap();
    let sharded: serde_json::Value = serde_json::from_str(&sharded).unwrap();
    assert_eq!(single["flat_count"], sharded["flat_count"]);
    assert_eq!(single["flat_count"], 58990);
    assert_eq!(sharded["partition_count"], 8);
}
