use std::process::Command;

use serde_json::Value;

fn octosep(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_octosep"))
        .args(args)
        .env_remove("OCTOSEP_WORKERS")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json, String::from_utf8_lossy(&out.stderr).to_string())
}

#[test]
fn formulas_exact_values() {
    let (code, v, _) = octosep(&["formulas", "--which", "Pk4", "--k", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "octosep-1");
    assert_eq!(v["result"]["value_exact"], "44482/4091349");
    assert_eq!(v["result"]["form"], "exact");
    let (_, v, _) = octosep(&["formulas", "--which", "Pk4", "--k", "2"]);
    assert_eq!(v["result"]["value_exact"], "4893392/95041567");
}

#[test]
fn formulas_p2_half() {
    let (code, v, _) = octosep(&["formulas", "--which", "P2", "--alpha", "1/2", "--k", "0", "--precision", "30"]);
    assert_eq!(code, 0);
    assert!(v["result"]["value_decimal"].as_str().unwrap().starts_with("0.4531250000"));
    assert_eq!(v["result"]["value_recognized"], "29/64");
    assert_eq!(v["result"]["value_exact"], Value::Null);
}

#[test]
fn formulas_domain_errors_exit_2() {
    assert_eq!(octosep(&["formulas", "--which", "P1", "--alpha", "-1/2"]).0, 2);
    assert_eq!(octosep(&["formulas", "--which", "P1"]).0, 2);
    assert_eq!(octosep(&["formulas", "--which", "P1", "--alpha", "1", "--precision", "5"]).0, 2);
}

#[test]
fn simulate_round_trips_its_manifest() {
    let args = ["simulate", "--a", "1/2", "--samples", "3000", "--seed", "7", "--gamma-variant", "plain", "--workers", "3"];
    let (code, v, _) = octosep(&args);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["generated"], 3000);
    assert_eq!(v["manifest"]["per_worker_samples"], serde_json::json!([1000, 1000, 1000]));
    // replay from the echoed config with one worker
    let m = &v["manifest"]["config"];
    let seed = m["flags"]["seed"].to_string();
    let a = m["a"].as_str().unwrap().to_string();
    let (_, w, _) = octosep(&["simulate", "--a", &a, "--samples", "3000", "--seed", &seed, "--gamma-variant", "plain"]);
    for key in ["pos_det", "ppt", "ordering_count", "near_zero_dets"] {
        assert_eq!(w["result"][key], r[key], "{key}");
    }
}

#[test]
fn simulate_invalid_flags_exit_2() {
    assert_eq!(octosep(&["simulate", "--a", "1", "--samples", "0", "--gamma-variant", "plain"]).0, 2);
    assert_eq!(octosep(&["simulate", "--a", "0", "--samples", "10", "--gamma-variant", "plain"]).0, 2);
    assert_eq!(octosep(&["simulate", "--a", "1", "--samples", "10", "--gamma-variant", "odd"]).0, 2);
    assert_eq!(octosep(&["simulate", "--a", "x", "--samples", "10", "--gamma-variant", "plain"]).0, 2);
    assert_eq!(octosep(&["simulate", "--a", "1", "--samples", "10", "--gamma-variant", "plain", "--dim", "2"]).0, 2);
}

#[test]
fn imaginary_residual_exits_3_with_provenance() {
    let (code, _, err) = octosep(&[
        "simulate", "--a", "1", "--samples", "50", "--seed", "4", "--gamma-variant", "plain",
        "--minor-rule", "symmetrized",
    ]);
    assert_eq!(code, 3);
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"], "imaginary-residual-exceeded");
    assert_eq!(e["seed"], 4);
    assert!(e["stream"].as_u64().unwrap() < 50);
}

#[test]
fn sweep_csv_matches_json() {
    let dir = std::env::temp_dir().join(format!("octosep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("s.csv");
    let json = dir.join("s.json");
    let (code, _, _) = octosep(&[
        "sweep", "--a-grid", "0.5:1:0.25", "--samples", "2000", "--seed", "3", "--gamma-variant", "plain",
        "--csv", csv.to_str().unwrap(), "--out", json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,sep_prob,stderr"));
    let grid = v["result"]["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 3);
    for (line, g) in lines.zip(grid) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[0], g["a"].as_f64().unwrap());
        assert_eq!(f[1], g["sep_prob"].as_f64().unwrap());
        assert_eq!(f[2], g["stderr"].as_f64().unwrap());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_malformed_grid_exit_2() {
    assert_eq!(octosep(&["sweep", "--a-grid", "0.1:0.2", "--samples", "10", "--gamma-variant", "plain"]).0, 2);
}

#[test]
fn calibrate_flags_unreached_targets_without_failing() {
    let (code, v, _) = octosep(&[
        "calibrate", "--k-list", "0,9", "--a-grid", "0.5:1:0.5", "--samples", "2000", "--seed", "1",
        "--gamma-variant", "plain",
    ]);
    assert_eq!(code, 0);
    let pairs = v["result"]["calibration"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    // P(0,4) ≈ 0.011 is far below the sampled range
    assert!(pairs[0]["extrapolated"].as_bool().unwrap() || pairs[0]["no_bracket"].as_bool().unwrap());
    assert_eq!(v["result"]["calibration"]["reference_f0"], 2.04852);
}

#[test]
fn eigcheck_and_forrester3_emit_json() {
    let (code, v, _) = octosep(&["eigcheck", "--n", "2", "--samples", "5000", "--bins", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["a_implied"], 3.0);
    let (code, v, _) = octosep(&["forrester3", "--a", "2", "--samples", "2000", "--gamma-variant", "plain"]);
    assert_eq!(code, 0);
    let f = v["result"]["fraction_negative"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
}

#[test]
fn workers_default_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_octosep"))
        .args(["simulate", "--a", "1", "--samples", "100", "--gamma-variant", "plain"])
        .env("OCTOSEP_WORKERS", "4")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["per_worker_samples"].as_array().unwrap().len(), 4);
}
