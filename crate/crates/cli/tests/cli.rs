use std::process::{Command, Output};

use serde_json::Value;

fn hlx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlx"))
        .args(args)
        .env_remove("HLX_THREADS")
        .output()
        .expect("failed to launch hlx")
}

fn record(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = hlx(&full);
    assert!(out.status.success(), "hlx {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

fn payload(args: &[&str]) -> Value {
    record(args)["payload"].clone()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn record_has_schema_and_config() {
    let rec = record(&["--seed", "5", "exponent", "-m", "2", "-r", "1", "-p", "2"]);
    assert_eq!(rec["schema_version"], 1);
    assert_eq!(rec["command"], "exponent");
    assert_eq!(rec["config"]["seed"], 5);
    assert_eq!(rec["config"]["m"], 2);
    assert!(rec["version"].is_string());
    assert!(rec["metadata"]["wall_time_seconds"].is_number());
}

#[test]
fn exponent_examples() {
    let v = payload(&["exponent", "-m", "2", "-r", "1", "-p", "2"]);
    assert_eq!(v["region"], "ThmA-low");
    assert_eq!(num(&v["exponent_upper"]), 1.5);
    assert_eq!(v["optimal"], true);

    let v = payload(&["exponent", "-m", "2", "-r", "1.3333333333333333", "-p", "inf"]);
    assert!(num(&v["exponent_upper"]).abs() < 1e-12);
    assert_eq!(v["optimal"], true);

    let v = payload(&["exponent", "-m", "3", "-r", "3", "-p", "2"]);
    assert_eq!(v["region"], "PropB");
    assert!((num(&v["exponent_upper"]) - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(v["optimal"], false);
    assert_eq!(num(&v["exponent_lower"]), 0.5);
}

#[test]
fn symbolic_inf_is_not_a_large_number() {
    let at_inf = payload(&["exponent", "-m", "2", "-r", "1.3333333333333333", "--p", "inf"]);
    let at_big = payload(&["exponent", "-m", "2", "-r", "1.3333333333333333", "--p", "1e18"]);
    assert_eq!(num(&at_inf["exponent_upper"]), 0.0);
    assert!(num(&at_big["exponent_upper"]) > 0.0);
    assert_ne!(at_inf, at_big);
    let cfg = record(&["exponent", "-m", "2", "-r", "2", "-p", "inf"])["config"].clone();
    assert_eq!(cfg["p"], "inf");
}

#[test]
fn norm_examples() {
    let v = payload(&["norm", "--family", "diagonal", "-m", "2", "-n", "4", "-p", "inf"]);
    assert_eq!(num(&v["value"]), 4.0);
    assert_eq!(v["is_exact"], true);

    let v = payload(&["norm", "--family", "diagonal", "-m", "2", "-n", "5", "-p", "2"]);
    assert!((num(&v["value"]) - 1.0).abs() < 1e-12);

    let args = ["--seed", "7", "norm", "--family", "sign", "-m", "2", "-n", "2", "-p", "inf", "--method", "vertex"];
    let a = payload(&args);
    assert_eq!(a["is_exact"], true);
    // A 2×2 sign matrix has ∞→1 norm 2 (Hadamard-like) or 4 (rank one).
    assert!([2.0, 4.0].contains(&num(&a["value"])));
    assert_eq!(a, payload(&args));
    assert_eq!(a["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn fit_example() {
    let v = payload(&[
        "fit", "--family", "diagonal", "-m", "2", "-r", "2", "-p", "3", "--n-list", "4,8,16,32", "--method", "exact",
    ]);
    assert!((num(&v["slope"]) - 1.0 / 6.0).abs() < 1e-9);
    assert!((num(&v["theoretical_exponent"]) - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
}

#[test]
fn certify_example_exits_zero() {
    let out = hlx(&[
        "--json", "certify", "-m", "2", "-p", "4", "-r", "2", "--family", "gaussian", "--instances", "10", "-n", "5",
        "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["payload"]["violations"], 0);
    assert_eq!(rec["payload"]["instances"].as_array().unwrap().len(), 10);
    assert!((num(&rec["payload"]["constant"]) - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn certify_with_too_small_constant_exits_four() {
    let out = hlx(&["certify", "-m", "2", "-p", "4", "-r", "2", "-n", "4", "--instances", "3", "--constant", "1e-3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn ksz_example() {
    let v = payload(&["ksz", "-m", "2", "-p", "inf", "--n-list", "2,4,8", "--samples", "50", "--seed", "1"]);
    let slope = num(&v["slope"]);
    assert!((1.4..=1.6).contains(&slope), "fitted slope {slope}");
}

#[test]
fn json_payload_is_deterministic() {
    let runs: [&[&str]; 3] = [
        &["--seed", "3", "ksz", "-m", "2", "-p", "inf", "--n-list", "2,3,4", "--samples", "20"],
        &["--seed", "3", "fit", "--family", "gaussian", "-m", "2", "-r", "2", "-p", "3", "--n-list", "2,4,6,8", "--method", "ascent", "--samples", "3"],
        &["--seed", "3", "norm", "--family", "gaussian", "-m", "3", "-n", "4", "-p", "3"],
    ];
    for args in runs {
        let a = record(args);
        let b = record(args);
        assert_eq!(a["payload"], b["payload"], "{args:?}");
        assert_eq!(a["config"], b["config"], "{args:?}");
        assert_eq!(serde_json::to_string(&a["payload"]).unwrap(), serde_json::to_string(&b["payload"]).unwrap());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["--seed", "9", "ksz", "-m", "2", "-p", "inf", "--n-list", "2,3,4", "--samples", "30"];
    let mut one = vec!["--threads", "1"];
    one.extend_from_slice(&args);
    let mut four = vec!["--threads", "4"];
    four.extend_from_slice(&args);
    let a = record(&one);
    let b = record(&four);
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["metadata"]["threads"], 1);
    assert_eq!(b["metadata"]["threads"], 4);

    let out = Command::new(env!("CARGO_BIN_EXE_hlx"))
        .args(["--json", "exponent", "-m", "2", "-r", "1", "-p", "2"])
        .env("HLX_THREADS", "2")
        .output()
        .unwrap();
    let rec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["metadata"]["threads"], 2);
}

#[test]
fn invalid_parameters_exit_two() {
    for args in [
        &["exponent", "-m", "2", "-r", "0.5", "-p", "2"][..],
        &["exponent", "-m", "1", "-r", "1", "-p", "2"],
        &["exponent", "-m", "2", "-r", "1", "-p", "0.5"],
        &["exponent", "-m", "2", "-r", "1", "-p", "nan"],
        &["exponent", "-m", "2", "-r", "1"],
        &["norm", "-p", "2"],
        &["norm", "--family", "sign", "-m", "2", "-n", "3", "-p", "2", "--restarts", "0"],
        &["fit", "-m", "2", "-r", "2", "-p", "3", "--n-list", "4"],
        &["certify", "-m", "2", "-r", "2", "-p", "4"],
    ] {
        let out = hlx(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?} printed no diagnostic");
    }
}

#[test]
fn capacity_and_oracle_errors_exit_three() {
    let out = hlx(&["norm", "--family", "sign", "-m", "8", "-n", "100", "-p", "inf"]);
    assert_eq!(out.status.code(), Some(3));
    let out = hlx(&["norm", "--family", "sign", "-m", "2", "-n", "3", "-p", "3", "--method", "vertex"]);
    assert_eq!(out.status.code(), Some(3));
    let out = hlx(&["norm", "--family", "sign", "-m", "2", "-n", "3", "-p", "3", "--method", "svd"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_output_has_header_and_rows() {
    let out = hlx(&[
        "fit", "-m", "2", "-r", "2", "-p", "3", "--n-list", "4,8,16,32", "--out", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,value");
    assert_eq!(lines.len(), 5);
    let (n, v) = lines[1].split_once(',').unwrap();
    assert_eq!(n, "4");
    assert!((v.parse::<f64>().unwrap() - 4f64.powf(1.0 / 6.0)).abs() < 1e-12);
}

#[test]
fn plot_and_tensor_files() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fit.svg");
    let out = hlx(&[
        "fit", "-m", "2", "-r", "2", "-p", "3", "--n-list", "4,8,16,32", "--plot", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<circle"));

    let phase = dir.path().join("phase.svg");
    assert!(hlx(&["phase", "-m", "3", "--plot", phase.to_str().unwrap()]).status.success());
    assert!(std::fs::read_to_string(&phase).unwrap().contains("PropB"));

    let tensor = dir.path().join("t.json");
    let t = tensor.to_str().unwrap();
    assert!(hlx(&["--seed", "4", "-o", t, "gen", "--family", "gaussian", "-m", "2", "-n", "3"]).status.success());
    let from_file = payload(&["norm", "--tensor", t, "-p", "inf"]);
    let generated = payload(&["--seed", "4", "norm", "--family", "gaussian", "-m", "2", "-n", "3", "-p", "inf"]);
    assert_eq!(from_file["value"], generated["value"]);

    let out = hlx(&["certify", "-m", "2", "-r", "2", "-p", "4", "--tensor", t, "--tensor", t]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn human_output_uses_ten_digits() {
    let out = hlx(&["fit", "-m", "2", "-r", "2", "-p", "3", "--n-list", "4,8,16,32"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("slope: 0.1666666667"), "{text}");
}
