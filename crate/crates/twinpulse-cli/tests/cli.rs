//! End-to-end tests of the binary: output formats, file artifacts, and the
//! exit-code contract (0 success, 1 verification failure, 2 usage, 3 I/O).

use std::path::PathBuf;
use std::process::{Command, Output};

use twinpulse::sequence::{build_twin, Family};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinpulse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn tmp_path(name: &str) -> PathBuf {
    let dir = tempfile::tempdir().expect("temp dir").keep();
    dir.join(name)
}

#[test]
fn phases_prints_pulse_table() {
    let out = run(&["phases", "--family", "type1", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "A 0 | B 1/4 | B 1 | B 1/4 | A 0\n");
}

#[test]
fn phases_reference_sequence() {
    let out = run(&["phases", "--ref", "L2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "A 0 | C 2/3 | A 0\n");
}

#[test]
fn phases_rejects_small_n() {
    let out = run(&["phases", "--family", "type1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["phases", "--family", "type9", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--family", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stray_n_flag_is_a_usage_error() {
    let out = run(&["phases", "--ref", "L1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_writes_csv_with_unit_peak() {
    let path = tmp_path("profile.csv");
    let out = run(&[
        "profile",
        "--family",
        "type1",
        "--n",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2002);
    assert_eq!(lines[0], "epsilon,p_numeric,p_analytic,one_minus_p_numeric");
    // middle row is ε = 0 with P = 1
    assert!(lines[1001].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
}

#[test]
fn profile_analytic_column_empty_for_references() {
    let out = run(&["profile", "--ref", "L3plus", "--points", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[2].is_empty(), "analytic cell should be empty: {line}");
    }
}

#[test]
fn profile_single_pulse_flag() {
    let out = run(&["profile", "--single-pulse", "--points", "5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["sequence_id"], "single-B");
    assert!(v["p_analytic"].is_null());
    // ε = -1 gives zero pulse area: P = 0
    assert!(v["p_numeric"][0].as_f64().unwrap() < 1e-30);
}

#[test]
fn profile_output_is_deterministic() {
    let a = tmp_path("a.csv");
    let b = tmp_path("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "profile",
            "--family",
            "type2",
            "--n",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn profile_rejects_bad_grid_and_format() {
    let out = run(&["profile", "--single-pulse", "--points", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["profile", "--single-pulse", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_is_an_io_error() {
    let out = run(&[
        "profile",
        "--single-pulse",
        "--points",
        "3",
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_family_reports_all_pass() {
    let path = tmp_path("reports.json");
    let out = run(&[
        "verify",
        "--family",
        "type1",
        "--n-max",
        "12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "verify exit: {:?}", out.status.code());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 11); // n = 2..=12
    for report in reports {
        assert_eq!(report["passed"], true, "{report}");
        assert!(report["max_off_coefficient"].as_f64().unwrap() < 1e-9);
        assert!(report["top_coefficient_error"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn verify_type2_family_passes() {
    let out = run(&["verify", "--family", "type2", "--n-max", "6"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn verify_chebyshev_to_30() {
    let out = run(&["verify", "--chebyshev", "--n-max", "30"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 30);
    for entry in v.as_array().unwrap() {
        assert_eq!(entry["passed"], true);
        assert!(entry["relative_residual"].as_f64().unwrap() < 1e-13);
    }
}

#[test]
fn verify_failure_exits_with_code_1() {
    // far beyond n = 30 the n-factor cosine product accumulates enough f64
    // rounding to breach the relative gate, which must surface as exit 1
    let out = run(&["verify", "--chebyshev", "--n-max", "800"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.as_array().unwrap().iter().any(|e| e["passed"] == false));
}

#[test]
fn verify_needs_exactly_one_mode() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--family", "type1", "--chebyshev"]).status.code(),
        Some(2)
    );
}

#[test]
fn compare_t3_type1_with_l4_is_identical() {
    let out = run(&["compare", "--a", "type1:3", "--b", "L4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["identical_within_tolerance"], true);
    assert!(v["max_abs_probability_difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn compare_t3_type1_beats_l3() {
    for variant in ["L3plus", "L3minus"] {
        let out = run(&["compare", "--a", "type1:3", "--b", variant, "--threshold", "1e-4"]);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let bw_a = v["bandwidth_a"].as_f64().unwrap();
        let bw_b = v["bandwidth_b"].as_f64().unwrap();
        assert!(bw_a > bw_b, "{variant}: {bw_a} vs {bw_b}");
        assert_eq!(v["identical_within_tolerance"], false);
    }
}

#[test]
fn compare_l1_with_smallest_type1_twin() {
    let out = run(&["compare", "--a", "L1", "--b", "type1:2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["identical_within_tolerance"], true);
    assert_eq!(v["max_abs_probability_difference"].as_f64().unwrap(), 0.0);
}

#[test]
fn bandwidth_closed_form_present_for_twins_only() {
    let out = run(&["bandwidth", "--family", "type1", "--n", "10", "--threshold", "1e-4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let numeric = v["epsilon_star"].as_f64().unwrap();
    let closed = v["epsilon_star_closed_form"].as_f64().unwrap();
    assert!((numeric - closed).abs() < 1e-9);

    let out = run(&["bandwidth", "--ref", "L3plus", "--threshold", "1e-4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["epsilon_star_closed_form"].is_null());
    assert!(v["epsilon_star"].as_f64().unwrap() > 0.1);
}

#[test]
fn bandwidth_rejects_bad_threshold() {
    let out = run(&["bandwidth", "--single-pulse", "--threshold", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sequence_file_round_trip() {
    let path = tmp_path("seq.json");
    let seq = build_twin(Family::Type2, 4).unwrap();
    std::fs::write(&path, seq.to_json()).unwrap();
    let via_file = run(&["phases", "--file", path.to_str().unwrap()]);
    assert!(via_file.status.success());
    let direct = run(&["phases", "--family", "type2", "--n", "4"]);
    assert_eq!(stdout(&via_file), stdout(&direct));
}

#[test]
fn corrupt_sequence_file_is_a_usage_error() {
    let path = tmp_path("bad.json");
    std::fs::write(&path, "{\"family\": 3}").unwrap();
    let out = run(&["phases", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_sequence_file_is_an_io_error() {
    let out = run(&["phases", "--file", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn integrate_reports_area_propagator_match() {
    let path = tmp_path("env.csv");
    let mut csv = String::from("t,omega\n");
    // triangular envelope with area π
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        let omega = std::f64::consts::PI * 2.0 * (1.0 - (2.0 * t - 1.0).abs());
        csv.push_str(&format!("{t},{omega}\n"));
    }
    std::fs::write(&path, csv).unwrap();
    let out = run(&["integrate", "--envelope", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["area_over_pi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["transition_probability"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(v["distance_from_area_propagator"].as_f64().unwrap() < 1e-10);
}

#[test]
fn integrate_missing_envelope_is_an_io_error() {
    let out = run(&["integrate", "--envelope", "/no/such/env.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn integrate_bad_header_is_a_usage_error() {
    let path = tmp_path("bad.csv");
    std::fs::write(&path, "time,omega\n0,1\n1,1\n").unwrap();
    let out = run(&["integrate", "--envelope", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
