use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn lsign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsign")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = lsign(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Data rows of a CSV with its header and metadata comments removed.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("lsign-cli-{}-{name}", std::process::id()))
}

#[test]
fn delta_coefficients() {
    let out = stdout(&["coeffs", "--form", "delta", "--limit", "100"]);
    assert!(out.starts_with("n,lambda\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 100);
    assert_eq!(r[1][0], "2");
    let v: f64 = r[1][1].parse().unwrap();
    assert!((v + 0.530_330_085_9).abs() < 1e-10);
    assert!(out.contains("# config_hash: "));
}

#[test]
fn ones_coefficients() {
    let r = rows(&stdout(&["coeffs", "--form", "ones", "--limit", "5"]));
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|row| row[1].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn capacity_errors_exit_fast() {
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let t = Instant::now();
        let out = lsign(&["coeffs", "--form", "delta", "--limit", "10^12"]);
        best = best.min(t.elapsed());
        assert_eq!(out.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    }
    assert!(best < Duration::from_millis(100), "{best:?}");
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["coeffs", "--form", "eta", "--limit", "10"][..],
        &["moments", "--f", "squarefree", "--x", "1e6,1e5"],
        &["moments", "--f", "squarefree", "--x", "1e5", "--R", "power:-1"],
        &["signs", "--form", "delta", "--x", "1e6", "--limit", "1000"],
        &["signs", "--form", "delta", "--x", "10", "--threads", "0"],
        &["diag", "pnt", "--form", "squarefree", "--x", "1e5"],
        &["diag", "hyp-h", "--nu", "1", "--x", "1e3"],
        &["moments", "--x", "1e5"],
        &["coeffs", "--bogus"],
    ] {
        let t = Instant::now();
        let out = lsign(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(t.elapsed() < Duration::from_secs(1), "{args:?}");
    }
}

#[test]
fn membership_failure_exits_4() {
    let out = lsign(&["moments", "--f", "squarefree", "--x", "1e4", "--R", "loglog-power:1e-9"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn squarefree_moments() {
    let r = rows(&stdout(&["moments", "--f", "squarefree", "--x", "1e5,1e6,1e7", "--format", "csv"]));
    assert_eq!(r.len(), 3);
    for row in r {
        let ratio: f64 = row[3].parse().unwrap();
        assert!((ratio - 1.0).abs() < 0.01);
    }
}

#[test]
fn delta_square_moments_schema() {
    let v = json(&["moments", "--f", "delta-sq", "--kappa", "1", "--x", "1e5,1e6"]);
    assert_eq!(v["label"], "delta-sq");
    assert_eq!(num(&v["kappa"]), 1.0);
    let c = &v["constant"];
    assert!(num(&c["value"]) > 0.0 && num(&c["tail_magnitude"]) >= 0.0);
    assert_eq!(c["prime_limit"].as_u64(), Some(1_000_000));
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    for p in points {
        for key in ["x", "empirical", "predicted", "ratio", "error_envelope"] {
            assert!(p[key].is_number(), "{key}");
        }
        assert!((num(&p["ratio"]) - 1.0).abs() < 0.01);
    }
    assert!(v["metadata"]["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn divisor_moments() {
    let v = json(&["moments", "--f", "piltz:2", "--x", "1e6"]);
    let ratio = num(&v["points"][0]["ratio"]);
    let gamma = 0.577_215_664_901_532_9;
    assert!((ratio - (1.0 + (2.0 * gamma - 1.0) / 1e6f64.ln())).abs() < 2e-3, "{ratio}");
}

#[test]
fn sign_statistics() {
    let v = json(&["signs", "--form", "delta", "--x", "10"]);
    assert_eq!(v["reports"][0]["n_plus"], 4);
    assert_eq!(v["reports"][0]["n_minus"], 6);
    assert_eq!(v["reports"][0]["sign_changes"], 7);
    let v = json(&["signs", "--form", "ones", "--x", "50"]);
    assert_eq!(v["reports"][0]["n_plus"], 50);
    assert!(v["reports"][0]["theorem1_bound"].is_null());
    let v = json(&["signs", "--form", "delta", "--x", "1e6"]);
    let r = &v["reports"][0];
    assert!((num(&r["theorem1_bound"]) - 3525.0).abs() < 1.0);
    assert_eq!(r["theorem1_pass"], true);
}

#[test]
fn prime_number_theorem_diagnostic() {
    let v = json(&["diag", "pnt", "--form", "delta", "--x", "1e6"]);
    let row = &v["rows"][0];
    assert!((0.9..=1.1).contains(&num(&row["prime_ratio"])));
    assert!((0.9..=1.1).contains(&num(&row["von_mangoldt_sq_ratio"])));
    assert!(num(&row["von_mangoldt_signed_ratio"]).abs() < 0.05);
}

#[test]
fn hypothesis_h_increments_shrink() {
    let v = json(&["diag", "hyp-h", "--form", "delta", "--nu", "2", "--x", "1e3,1e4,1e5"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows[0]["increment"].is_null());
    let inc: Vec<f64> = rows[1..].iter().map(|r| num(&r["increment"])).collect();
    assert!(inc[1] < inc[0] && inc[1] > 0.0);
}

#[test]
fn lemma25_constants_are_stable() {
    let v = json(&["diag", "lemma25", "--R", "power:1", "--z", "1e3..1e9"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    for d in v["drift"].as_array().unwrap() {
        assert!((1.0..2.0).contains(&num(d)), "{d}");
    }
}

#[test]
fn output_is_independent_of_threads() {
    for args in [
        &["moments", "--f", "piltz:0.5", "--x", "1e4..1e6"][..],
        &["signs", "--form", "sym:2", "--x", "1e3,1e5"],
        &["diag", "pnt", "--form", "delta", "--x", "1e5"],
    ] {
        let mut outs = Vec::new();
        for t in ["1", "4", "8"] {
            let path = scratch(&format!("threads-{t}"));
            let mut a = args.to_vec();
            a.extend(["--threads", t, "--output", path.to_str().unwrap()]);
            stdout(&a);
            outs.push(std::fs::read(&path).unwrap());
            std::fs::remove_file(path).unwrap();
        }
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let path = scratch("config.toml");
    std::fs::write(&path, "form = \"delta\"\nx = [10, 100]\nformat = \"json\"\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["signs", "--config", p]);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    let v = json(&["signs", "--config", p, "--x", "10"]);
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
    assert_eq!(v["metadata"]["config"]["x"], "10");

    std::fs::write(&path, "limit = 5\nnu = 2\n").unwrap();
    let out = lsign(&["coeffs", "--config", p]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn json_numbers_carry_17_digits() {
    let out = stdout(&["signs", "--form", "delta", "--x", "10"]);
    assert!(out.contains("\"x\":1.0000000000000000e1"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&v.to_string()).unwrap(), v);
}
