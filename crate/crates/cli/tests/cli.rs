use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cobdetect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn builtin_basis_validates() {
    let out = run(&[
        "basis",
        "validate",
        "--name",
        "construction1-d2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    for key in [
        "orthogonality_residual",
        "completeness_residual",
        "hermiticity_residual",
    ] {
        assert!(r[key].as_f64().unwrap() < 1e-12, "{key}");
    }
}

#[test]
fn identity_quadruple_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let identity = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]];
    let file = serde_json::json!({ "dim": 2, "label": "bad", "operators": vec![identity; 4] });
    std::fs::write(&path, file.to_string()).unwrap();
    let out = run(&["basis", "validate", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn qutrit_basis_shows_nine_operators() {
    let out = run(&["basis", "show", "--name", "construction2-d3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.ends_with(" =")).count(), 9);
    assert!(text.contains("A9 ="));
}

#[test]
fn shown_basis_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "basis",
        "show",
        "--name",
        "construction2-d2",
        "--format",
        "json",
    ]);
    let path = dir.path().join("b.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = run(&["basis", "validate", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn example1_verdicts_either_side_of_threshold() {
    let below = json(&run(&["verdict", "--example", "1", "--x", "0.1"]));
    assert_eq!(below["verdict"], "entanglement_detected");
    assert_eq!(below["criterion"], "cor1");
    assert_eq!(below["basis_labels"][0], "construction1-d2");
    let above = json(&run(&["verdict", "--example", "1", "--x", "0.3"]));
    assert_eq!(above["verdict"], "inconclusive");
    assert_eq!(above["borderline"], false);
}

#[test]
fn example3_detected_at_half() {
    let r = json(&run(&["verdict", "--example", "3", "--x", "0.5"]));
    assert_eq!(r["criterion"], "thm4i");
    assert_eq!(r["verdict"], "entanglement_detected");
}

#[test]
fn explicit_flags_match_example_pin() {
    let pinned = json(&run(&[
        "verdict",
        "--example",
        "3",
        "--x",
        "0.5",
        "--criterion",
        "thm4ii",
    ]));
    let explicit = json(&run(&[
        "verdict",
        "--state",
        "ghz4",
        "--x",
        "0.5",
        "--basis",
        "construction1-d2",
        "--criterion",
        "thm4ii",
        "--partition",
        "12|34",
    ]));
    assert_eq!(pinned["statistic"], explicit["statistic"]);
    assert_eq!(pinned["bound"], explicit["bound"]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(
        &path,
        "state = \"ghz4\"\nx = 0.3\ncriterion = \"thm4i\"\nl1 = 2\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_config = json(&run(&["verdict", "--config", cfg]));
    assert_eq!(from_config["verdict"], "inconclusive");
    let overridden = json(&run(&["verdict", "--config", cfg, "--x", "0.9"]));
    assert_eq!(overridden["verdict"], "entanglement_detected");
}

#[test]
fn file_state_is_used_as_given() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = serde_json::json!({ "dims": [2, 2], "amplitudes": [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [h, 0.0]] });
    std::fs::write(&path, state.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let pure = json(&run(&["verdict", "--state", p, "--criterion", "thm3"]));
    assert_eq!(pure["verdict"], "entanglement_detected");
    let noisy = json(&run(&[
        "verdict",
        "--state",
        p,
        "--x",
        "0.0",
        "--criterion",
        "thm3",
    ]));
    assert_eq!(noisy["verdict"], "inconclusive");
}

#[test]
fn scan_csv_is_byte_stable() {
    let args = [
        "scan",
        "--example",
        "4",
        "--grid",
        "0:1:0.05",
        "--tol",
        "1e-6",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,statistic,bound,margin,g5"));
    assert_eq!(lines.count(), 21);
}

#[test]
fn scan_json_reports_threshold() {
    let r = json(&run(&["scan", "--example", "1", "--format", "json"]));
    let x = r["threshold"]["x"].as_f64().unwrap();
    assert!((x - 0.1919).abs() <= 5e-4, "{x}");
    assert_eq!(r["threshold"]["crossing"], "falling");
}

#[test]
fn scan_without_sign_change_flags_missing_threshold() {
    let r = json(&run(&[
        "scan",
        "--state",
        "ghz4",
        "--criterion",
        "thm4i",
        "--grid",
        "0:0.3:0.1",
        "--format",
        "json",
    ]));
    assert!(r["threshold"].is_null());
    assert!(r["note"].is_string());
}

#[test]
fn reproduce_examples_1_3_4_pass() {
    for (example, rows) in [("1", 1), ("3", 2), ("4", 1)] {
        let out = run(&["reproduce", example]);
        assert_eq!(out.status.code(), Some(0), "example {example}");
        assert_eq!(stdout(&out).matches("PASS").count(), rows);
    }
}

#[test]
fn reproduce_example2_reports_both_rows() {
    let out = run(&["reproduce", "2", "--format", "json"]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["published"], 0.496);
    assert_eq!(rows[1]["published"], 0.7152);
    assert!(rows[1]["note"].is_string());
    let all_passed = rows.iter().all(|r| r["passed"] == true);
    assert_eq!(out.status.code(), Some(if all_passed { 0 } else { 1 }));
}

#[test]
fn tensor_csv_has_one_row_per_index() {
    let out = run(&["tensor", "--state", "example2_phi", "--x", "0.5"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("alpha1,alpha2,alpha3,mu"));
    assert_eq!(text.lines().count(), 1 + 9 * 9 * 4);
}

#[test]
fn verify_separable_samples_pass() {
    let out = run(&[
        "verify",
        "--family",
        "k_separable_mixture",
        "--dims",
        "2,2,2,2",
        "--partition",
        "1|234",
        "--criterion",
        "thm4i",
        "--count",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["samples"], 200);
}

#[test]
fn verify_flags_entangled_samples() {
    let out = run(&[
        "verify",
        "--family",
        "haar_pure",
        "--dims",
        "2,2",
        "--criterion",
        "thm3",
        "--count",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["verdict", "--state", "ghz3"][..],
        &[
            "verdict",
            "--state",
            "nope",
            "--x",
            "0.1",
            "--criterion",
            "thm3",
        ],
        &[
            "verdict",
            "--state",
            "ghz3",
            "--x",
            "1.5",
            "--criterion",
            "thm3",
        ],
        &[
            "verdict",
            "--state",
            "ghz3",
            "--x",
            "0.1",
            "--criterion",
            "thm9",
        ],
        &[
            "verdict",
            "--state",
            "ghz3",
            "--x",
            "0.1",
            "--criterion",
            "thm4ii",
        ],
        &["scan", "--example", "1", "--grid", "0:2:0.1"],
        &["scan", "--example", "1", "--tol", "1e-12"],
        &["reproduce", "7"],
        &["basis", "show", "--name", "construction9-d9"],
        &[
            "verdict",
            "--example",
            "1",
            "--x",
            "0.1",
            "--basis",
            "construction1-d2",
            "--basis",
            "construction1-d2",
        ],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
