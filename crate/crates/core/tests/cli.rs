use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bsft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsft")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{name}"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(args: &[&str], name: &str) -> Value {
    let out = tmp(name);
    let mut a = vec!["build"];
    a.extend_from_slice(args);
    a.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let o = bsft(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

fn shape(v: &Value) -> (usize, usize) {
    let steps = v["circuit"]["timesteps"].as_array().unwrap();
    (steps.iter().map(|s| s.as_array().unwrap().len()).sum(), steps.len())
}

#[test]
fn build_examples() {
    assert_eq!(shape(&build(&["ccz3x3"], "ccz.json")), (27, 3));
    assert_eq!(shape(&build(&["ckz", "--m", "3", "--n", "9", "--k", "2"], "ckz39.json")).1, 1);
    assert_eq!(shape(&build(&["ckz", "--m", "2", "--n", "2", "--k", "1"], "ckz22.json")).0, 4);

    let o = bsft(&["build", "two-transversal", "--m", "5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bsft(&["build", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports() {
    build(&["ccz3x3"], "chk-ccz.json");
    let p = tmp("chk-ccz.json");
    let o = bsft(&["check", p.to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("two-row criterion: VIOLATED") && text.contains("warning"));
    assert!(text.contains("logical action: PASS"));
    // same file, same report
    assert_eq!(stdout(&bsft(&["check", p.to_str().unwrap()])), text);

    build(&["ckz", "--m", "3", "--n", "9", "--k", "2"], "chk-ckz.json");
    let o = bsft(&["check", tmp("chk-ckz.json").to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(text.contains("two-row criterion: PASS") && text.contains("logical action: PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn mutated_circuit_fails_check() {
    let mut v = build(&["ckz", "--m", "3", "--n", "3", "--k", "2"], "mut-src.json");
    v["circuit"]["timesteps"][0].as_array_mut().unwrap().remove(4);
    let p = tmp("mut.json");
    std::fs::write(&p, v.to_string()).unwrap();
    let o = bsft(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("logical action: FAIL"));

    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(bsft(&["check", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn cost_rows() {
    let o = bsft(&["cost", "bs3x3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("protocol,circuit_volume,spacetime_volume_us_qubits,time_us,qubits"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "BS 3x3");
    assert_eq!(row[4], "54");
    assert_eq!(stdout(&bsft(&["cost"])).lines().count(), 4);
    assert_eq!(bsft(&["cost", "magic11"]).status.code(), Some(1));
}

#[test]
fn config_file_and_precedence() {
    let cfg = tmp("cfg.json");
    std::fs::write(&cfg, r#"{"m": 4, "n": 9, "k": 1, "gadget": "ckz-round-robin"}"#).unwrap();
    let o = bsft(&["--config", cfg.to_str().unwrap(), "--show-config", "build", "--n", "8"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["m"].as_u64(), v["n"].as_u64(), v["k"].as_u64()), (Some(4), Some(8), Some(1)));
    assert_eq!(v["gadget"], "ckz-round-robin");
    assert_eq!(v["model"], "uniform");

    std::fs::write(&cfg, r#"{"m": 4, "colour": "blue"}"#).unwrap();
    let o = bsft(&["--config", cfg.to_str().unwrap(), "build"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    assert_eq!(bsft(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bsft(&["--help"]).status.code(), Some(0));
}

#[test]
fn threshold_at_zero_rate_and_budget_failure() {
    let out = tmp("cnot.csv");
    let o = bsft(&["threshold", "cnot", "--model", "uniform", "--grid", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,p2_fail,one_minus_p2_succ"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, 0.0, 0.0]);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["gate"], "CNOT");
    let lo = summary["threshold_lower"].as_f64().unwrap();
    let hi = summary["threshold_upper"].as_f64().unwrap();
    assert!(lo <= hi);

    let cfg = tmp("tiny.json");
    std::fs::write(&cfg, r#"{"max_configs": 10}"#).unwrap();
    let o = bsft(&["--config", cfg.to_str().unwrap(), "threshold", "I"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(bsft(&["threshold", "T"]).status.code(), Some(1));
}

#[test]
fn export_decoder_json() {
    let o = bsft(&["export-decoder", "--m", "3", "--n", "3", "--round", "type1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 3);
    assert!(v["x_recoveries"].as_array().unwrap().iter().any(|e| e["flips"] == 0 && e["qubits"].as_array().unwrap().is_empty()));
}
