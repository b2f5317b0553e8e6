use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SRS: &str = r#"{"degree":2,"coefficients":["1","-3/2"],"initial":["0","1"],"rule":"srs"}"#;
const FLOOR32: &str = r#"{"degree":1,"coefficients":["-3/2"],"initial":[],"rule":"target",
    "targets":[{"gamma":"1","alpha":"3/2"}],"rounding":"floor","offset":"0"}"#;
const FLOOR52: &str = r#"{"degree":1,"coefficients":["-5/2"],"initial":[],"rule":"target",
    "targets":[{"gamma":"1","alpha":"5/2"}],"rounding":"floor","offset":"0"}"#;

fn nlrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlrs"))
        .args(args)
        .env_remove("NLRS_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "srs.json", SRS);
    let csv = dir.path().join("seq.csv");
    let out = nlrs(&[
        "generate",
        "--config",
        cfg.to_str().unwrap(),
        "--count",
        "100",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[0], "n,a_n,e_n");
    assert_eq!(lines[1], "0,0,0");
    // a_2 = 2 against 3/2 from the linear part.
    assert_eq!(lines[3], "2,2,0.50000000000000000000 [1/2]");
}

#[test]
fn generate_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "srs.json", SRS);
    let v = json(&nlrs(&[
        "generate",
        "--config",
        cfg.to_str().unwrap(),
        "--count",
        "5",
        "--format",
        "json",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[2]["e_n"], "0.50000000000000000000 [1/2]");
}

#[test]
fn analyze_reports_binet_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "floor32.json", FLOOR32);
    let v = json(&nlrs(&["analyze", "--config", cfg.to_str().unwrap(), "--count", "500"]));
    for key in ["roots", "betas", "residual_stats"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn exit_codes() {
    let unknown = nlrs(&["bogus"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    assert_eq!(nlrs(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"degree":2,"coefficients":["1","2","3"],"initial":["0","1"],"rule":"srs"}"#,
    );
    let out = nlrs(&["generate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coefficients"));

    let capped = nlrs(&[
        "--precision-cap",
        "64",
        "common",
        "counterexample",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--c",
        "21/20",
    ]);
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "floor32.json", FLOOR32);
    let args = ["analyze", "--config", cfg.to_str().unwrap(), "--count", "200"];
    assert_eq!(nlrs(&args).stdout, nlrs(&args).stdout);
    let shift = [
        "construct",
        "shift",
        "--a",
        r#"{"ln":{"rational":"2"}}"#,
        "--b",
        r#"{"ln":{"rational":"3"}}"#,
        "--c",
        "21/20",
    ];
    let first = nlrs(&shift);
    assert!(first.status.success());
    assert_eq!(first.stdout, nlrs(&shift).stdout);
}

#[test]
fn common_search_and_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", FLOOR32);
    let b = write(dir.path(), "b.json", FLOOR52);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let v = json(&nlrs(&[
        "common",
        "search",
        "--config",
        a,
        "--config",
        b,
        "--kmax",
        "80",
        "--mmax",
        "80",
        "--workers",
        "3",
    ]));
    let pairs: Vec<(String, String)> = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["k"].as_str().unwrap().into(), p["m"].as_str().unwrap().into()))
        .collect();
    let expect: Vec<(String, String)> = [("0", "0"), ("1", "0"), ("2", "1")]
        .iter()
        .map(|(k, m)| (k.to_string(), m.to_string()))
        .collect();
    assert_eq!(pairs, expect);

    let g = json(&nlrs(&[
        "common", "gaps", "--config", a, "--config", b, "--count", "200",
    ]));
    assert_eq!(g["constants"]["k0"], "12");
    assert_eq!(g["certificate"]["passed"], true);
}

#[test]
fn matveev_linefit_cf_heights() {
    let m = json(&nlrs(&[
        "common",
        "matveev",
        "--gamma",
        "2",
        "--gamma",
        "3",
        "--exponent",
        "5",
        "--exponent",
        "-3",
        "--bound",
        "10",
    ]));
    let lb: f64 = m["lower_bound"][0].as_str().unwrap().parse().unwrap();
    assert!((lb / -1.935945912796e9 - 1.0).abs() < 1e-9);

    let l = json(&nlrs(&[
        "common", "linefit", "--pair", "0,0", "--pair", "3,1", "--pair", "6,2",
    ]));
    assert_eq!(
        (l["kind"].as_str(), l["u"].as_str(), l["v"].as_str()),
        (Some("line"), Some("3"), Some("1"))
    );

    let c = json(&nlrs(&[
        "cf",
        "--value",
        r#"{"sqrt":{"rational":"2"}}"#,
        "--count",
        "4",
    ]));
    assert_eq!(c["partial_quotients"], serde_json::json!(["1", "2", "2", "2"]));

    let h = json(&nlrs(&["heights", "--alpha", "2", "--alpha", "3/2"]));
    let hi: Vec<f64> = h["heights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["height"][1].as_str().unwrap().parse().unwrap())
        .collect();
    assert!((hi[0] - 2f64.ln()).abs() < 1e-11);
    assert!((hi[1] - 3f64.ln()).abs() < 1e-11);
}
