use std::process::{Command, Output};

use serde_json::Value;

fn twofold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twofold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn dim_matches_the_equal_ratio_closed_form() {
    let out = twofold(&["dim", "--p", "0.0625", "--q", "0.0625"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let d = v["d"]["decimal"].as_f64().unwrap();
    let closed = (1.0 - std::f64::consts::FRAC_1_SQRT_2).ln() / (1.0f64 / 16.0).ln();
    assert!((d - closed).abs() < 1e-9);
    assert_eq!(v["p"]["rational"], "1/16");
    assert_eq!(v["mode"], "ExactRational");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn dim_ladder_is_certified() {
    let out = twofold(&["dim", "--p", "1/20", "--q", "1/50", "--ladder", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ladder"]["certified_increasing"], true);
    assert_eq!(v["ladder"]["rungs"].as_array().unwrap().len(), 10);
}

#[test]
fn check_tf_reports_the_square_overlap() {
    let out = twofold(&["check-tf", "--p", "0.0625", "--q", "0.00390625", "--max-sum", "6", "--depth", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["kind"], "FailedAt");
    assert_eq!((v["summary"]["m"].as_u64(), v["summary"]["n"].as_u64()), (Some(2), Some(1)));
}

#[test]
fn check_tf_with_unknowns_exits_three() {
    // depth 0 cannot separate the (1, 1) candidate
    let out = twofold(&["check-tf", "--p", "1/20", "--q", "99/2000", "--max-sum", "2", "--depth", "0"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert_eq!(json(&out)["summary"]["unknowns"][0], serde_json::json!([1, 1]));
}

#[test]
fn cover_of_b_at_depth_one_is_one_interval() {
    let out = twofold(&["cover", "--p", "0.05", "--q", "0.02", "--set", "B", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "depth,tag,lo,hi\n1,B,0,1/20\n");
}

#[test]
fn out_of_range_parameters_are_rejected() {
    for (p, q) in [("0.1", "0.01"), ("0", "0.01"), ("-1/20", "0.01"), ("abc", "0.01")] {
        let out = twofold(&["dim", "--p", p, "--q", q]);
        assert_eq!(out.status.code(), Some(2), "p = {p}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn unknown_or_missing_commands_exit_one() {
    assert_eq!(twofold(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(twofold(&[]).status.code(), Some(1));
    assert_eq!(twofold(&["--help"]).status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_without_meta() {
    let args = ["witness-wsp", "--p", "1/20", "--q", "1/50", "--count", "3"];
    let a = twofold(&args);
    let b = twofold(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("meta").is_none());
    let with_meta = twofold(&["--meta", "witness-wsp", "--p", "1/20", "--q", "1/50", "--count", "3"]);
    assert_eq!(json(&with_meta)["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn wsp_witnesses_and_degenerate_pairs() {
    let v = json(&twofold(&["witness-wsp", "--p", "1/20", "--q", "1/50"]));
    let w = &v["witnesses"];
    assert_eq!(w.as_array().unwrap().len(), 5);
    assert_eq!((w[0]["m"].as_u64(), w[0]["n"].as_u64()), (Some(13), Some(10)));
    let out = twofold(&["witness-wsp", "--p", "1/16", "--q", "1/256"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn order_witness_and_exhausted_search() {
    let base = ["witness-order", "--p", "1/20", "--q", "1/50", "--p2", "1/25", "--q2", "1/50"];
    let v = json(&twofold(&base));
    assert_eq!(v["result"]["kind"], "Found");
    assert_eq!(v["result"]["kl"], serde_json::json!([0, 4]));
    assert_eq!(v["result"]["mn"], serde_json::json!([5, 0]));
    assert_eq!(v["result"]["verified"], true);
    let out = twofold(&[&base[..], &["--max-exp", "4"]].concat());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn transport_by_address_and_by_rep_agree() {
    let a = json(&twofold(&["transport", "--p", "1/20", "--q", "1/50", "--address", "3,(1)"]));
    let b = json(&twofold(&["transport", "--p", "1/20", "--q", "1/50", "--rep", "[[0,0],[1,0]]"]));
    assert_eq!(a["value"]["rational"], "19/20");
    assert_eq!(a["value"], b["value"]);
    let zero = twofold(&["transport", "--p", "1/20", "--q", "1/50", "--address", "(1)"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn gap_single_value_and_probe() {
    let v = json(&twofold(&["gap", "--p", "1/20", "--q", "1/50", "--depth", "2"]));
    assert_eq!(v["gap"]["lo"]["rational"], "9/20");
    assert_eq!(v["gap"]["hi"]["rational"], "9/20");
    let csv = stdout(&twofold(&["gap", "--p", "1/20", "--q", "1/50", "--k-max", "2"]));
    assert_eq!(csv, "k,t,gap_lo,gap_hi\n0,1,9/20,9/20\n1,1000,11/40,11/40\n2,1000000,11/40,11/40\n");
    let unresolved = twofold(&["gap", "--p", "1/20", "--q", "1/50", "--depth", "0"]);
    assert_eq!(unresolved.status.code(), Some(3));
    let bad = twofold(&["gap", "--p", "1/20", "--q", "1/50", "--anchor", "middle"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scan_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("scan.svg");
    let out = twofold(&[
        "--jobs",
        "2",
        "scan",
        "--resolution",
        "4",
        "--max-sum",
        "6",
        "--depth",
        "6",
        "--p-lo",
        "1/32",
        "--q-lo",
        "1/32",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("p,q,status,m,n,gap_or_residual\n"));
    assert_eq!(text.lines().count(), 17);
    assert!(text.contains(",flagged,1,1,"));
    let drawn = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(drawn.matches("<rect").count(), 16);
    let bad = twofold(&["scan", "--p-hi", "1/8"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn slice_flags_the_diagonal() {
    let out = twofold(&["slice", "--p", "1/20", "--samples", "16", "--max-sum", "4", "--depth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("1/20,1/20,flagged,1,1")));
    assert!(text.lines().any(|l| l.starts_with("1/20,1/400,flagged,2,1")));
}

#[test]
fn boxdim_from_file_and_middle_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.txt");
    let grid: String = (0..4096).map(|k| format!("{}\n", k as f64 / 4096.0)).collect();
    std::fs::write(&path, grid).unwrap();
    let v = json(&twofold(&["boxdim", "--input", path.to_str().unwrap()]));
    assert!((v["slope"].as_f64().unwrap() - 1.0).abs() < 0.05);
    let v = json(&twofold(&["boxdim", "--middle-thirds", "8"]));
    assert!((v["slope"].as_f64().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 0.05);
    std::fs::write(&path, "0.5\nnope\n").unwrap();
    assert_eq!(twofold(&["boxdim", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn float_mode_reports_enclosures() {
    let v = json(&twofold(&["--float", "check-tf", "--p", "1/20", "--q", "1/50", "--max-sum", "6", "--depth", "6"]));
    assert_eq!(v["mode"], "RoundedInterval");
    assert_eq!(v["summary"]["kind"], "CertifiedUpTo");
    let d = json(&twofold(&["--float", "dim", "--p", "0.05", "--q", "0.02"]));
    assert!(d["p"]["lo"].is_object());
}
