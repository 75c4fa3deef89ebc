use std::path::PathBuf;
use std::process::{Command, Output};

use capclass_core::census::CensusReport;
use capclass_core::{RunReport, VerdictKind};

fn capclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capclass")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("capclass-cli-{}-{name}", std::process::id()))
}

#[test]
fn definite_verdict_exits_zero() {
    let o = capclass(&["analyze", "--n", "12", "--t", "5", "--X", "3/5", "--Y", "3/5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("METHOD_CAN_SUCCEED"));
}

#[test]
fn boundary_verdict_exits_two() {
    // Concentric unit disks with trivial finite factor: gamma is exactly 1.
    let o = capclass(&["analyze", "--n", "12", "--t", "1", "--X", "1", "--Y", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("BOUNDARY"));
}

#[test]
fn malformed_rational_exits_one() {
    let o = capclass(&["analyze", "--n", "12", "--t", "5", "--X", "1/0", "--Y", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn y_at_most_one_third_is_rejected() {
    let o = capclass(&["analyze", "--n", "12", "--t", "5", "--X", "1", "--Y", "1/3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn non_unit_multiplier_is_rejected() {
    let o = capclass(&["hnp", "--n", "12", "--c0", "4", "--d0", "1", "--c1", "5", "--d1", "2", "--X", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn infeasible_instance_explains_itself() {
    let o = capclass(&["analyze", "--n", "12", "--t", "5", "--X", "100", "--Y", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shrink X or Y"));
}

#[test]
fn json_report_round_trips() {
    let o = capclass(&["--json", "analyze", "--n", "12", "--t", "5", "--X", "3/5", "--Y", "3/5", "--check-oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let report: RunReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.verdict.kind, VerdictKind::MethodCanSucceed);
    assert!(report.oracle_consistent());
    let raw: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), raw);
}

#[test]
fn instance_file_matches_flags() {
    let from_flags = capclass(&["--json", "analyze", "--n", "12", "--t", "7", "--X", "4/5", "--Y", "1/2"]);
    let report: RunReport = serde_json::from_str(&stdout(&from_flags)).unwrap();
    let path = scratch("instance.json");
    std::fs::write(&path, serde_json::to_string(&report.instance).unwrap()).unwrap();
    let from_file = capclass(&["--json", "analyze", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(from_flags.status.code(), from_file.status.code());
    assert_eq!(stdout(&from_flags), stdout(&from_file));
}

#[test]
fn oracle_lists_every_small_solution() {
    let o = capclass(&["--json", "search", "--n", "12", "--t", "7", "--X", "5", "--Y", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sols = &v[0]["solutions"];
    assert_eq!(sols, &serde_json::json!([[[-5, 0], [-1, 0]], [[0, 0], [0, 0]], [[5, 0], [1, 0]]]));
}

#[test]
fn obstruction_holds_in_every_ring() {
    let o = capclass(&["search", "--all-rings", "--n", "12", "--t", "7", "--x0", "5", "--y0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("holds").count(), 4, "{text}");
}

#[test]
fn census_is_reproducible_from_the_seed() {
    let run = |seed: &str, threads: &str| {
        let o = capclass(&["--json", "--seed", seed, "--threads", threads, "census", "--p", "10007", "--samples", "300"]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let a = run("7", "1");
    assert_eq!(a, run("7", "4"));
    assert_ne!(a, run("8", "1"));
    let report: CensusReport = serde_json::from_slice(&a).unwrap();
    assert_eq!(report.records.len(), 300);
}

#[test]
fn census_writes_csv_records() {
    let path = scratch("records.csv");
    let o = capclass(&["census", "--p", "10007", "--samples", "50", "--records", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn lens_capacity_with_fekete_estimate() {
    let o = capclass(&["--json", "capacity", "--r", "1", "--s", "1", "--fekete", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lo = v["capacity"]["interval"]["lo"].as_f64().unwrap();
    let est = v["fekete"]["estimate"].as_f64().unwrap();
    assert!((est - lo).abs() / lo < 0.05, "fekete {est} vs {lo}");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(capclass(&["--help"]).status.code(), Some(0));
    assert_eq!(capclass(&["--version"]).status.code(), Some(0));
}
