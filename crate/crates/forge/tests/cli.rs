use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_albert-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, config: &str, extra: &[&str]) -> (i32, Value, String) {
    let path = configs().join(config);
    let mut args = vec![sub, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = forge(&args);
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, stderr)
}

fn check<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("no check {id}"))
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("elapsed_ms");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn first_construction_axioms_pass() {
    let (code, report, _) = run("check-axioms", "first-construction.toml", &["--seed", "42", "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["summary"]["failed"], 0);
    assert_eq!(check(&report, "axioms/x##=N(x)x")["evaluations"], 20);
}

#[test]
fn inadmissible_pair_is_a_configuration_error() {
    let (code, report, stderr) = run("build", "inadmissible.toml", &[]);
    assert_eq!(code, 2);
    assert!(report.is_null());
    assert!(stderr.contains("N_B(u) ≠ μμ̄"), "{stderr}");
}

#[test]
fn isotope_isomorphism_is_certified() {
    let (code, report, _) = run("verify-iso", "nine-dim.toml", &[]);
    assert_eq!(code, 0);
    let c = check(&report, "verify-iso");
    assert_eq!(c["status"], "pass");
    assert_eq!(c["evaluations"], 165);
    assert_eq!(c["data"]["nu"], "1/1");
    assert_eq!(c["data"]["target_mu"], serde_json::json!(["6/1", "4/1"]));
}

#[test]
fn galois_extension_and_its_fixed_points() {
    let (code, report, _) = run("extend-aut", "nine-dim.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(check(&report, "extend-aut/galois")["data"]["order_three"], true);
    let (code, report, _) = run("fixed", "nine-dim.toml", &[]);
    assert_eq!(code, 0);
    let f = check(&report, "fixed/0");
    assert_eq!(f["data"]["dim"], 3);
    assert_eq!(f["data"]["stratum"], "3");
}

#[test]
fn word_multiplier() {
    let (code, report, _) = run("word", "nine-dim.toml", &[]);
    assert_eq!(code, 0);
    let w = check(&report, "word/0");
    assert_eq!(w["data"]["nu"], "8/1");
    assert_eq!(w["data"]["letter_multipliers"], serde_json::json!(["8/1", "1/1"]));
}

#[test]
fn empty_suite_gives_an_empty_report() {
    let (code, report, _) = run("report", "empty.toml", &[]);
    assert_eq!(code, 0);
    assert_eq!(report["summary"]["total"], 0);
    assert!(report["checks"].as_array().unwrap().is_empty());
}

#[test]
fn mutation_failure_carries_a_witness() {
    let (code, report, stderr) = run("check-axioms", "mutation.toml", &["--seed", "7", "--trials", "10"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("FAIL"));
    let failed: Vec<&Value> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .collect();
    assert!(!failed.is_empty());
    // Two-argument identities report `x` followed by `y`.
    for c in failed {
        let n = c["witness"].as_array().unwrap().len();
        assert!(n == 3 || n == 6, "{c}");
    }
}

#[test]
fn randomized_suites_need_a_seed() {
    let (code, _, stderr) = run("check-axioms", "first-construction.toml", &[]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--seed"));
}

#[test]
fn unreadable_or_malformed_config_exits_2() {
    let out = forge(&["build", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = std::env::temp_dir().join("albert-forge-bad.toml");
    std::fs::write(&bad, "[structure.J]\nkind = \"nonsense\"\n").unwrap();
    let out = forge(&["build", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = forge(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let args = ["--seed", "11", "--trials", "15"];
    let (_, mut a, _) = run("report", "nine-dim.toml", &args);
    let (_, mut b, _) = run("report", "nine-dim.toml", &args);
    let times = |r: &Value| {
        assert!(r["elapsed_ms"].as_f64().unwrap() >= 0.0);
        for c in r["checks"].as_array().unwrap() {
            assert!(c["elapsed_ms"].as_f64().unwrap() >= 0.0);
        }
    };
    times(&a);
    times(&b);
    strip_timings(&mut a);
    strip_timings(&mut b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn report_file_is_written() {
    let out_path = std::env::temp_dir().join("albert-forge-build.json");
    let path = configs().join("first-construction.toml");
    let out = forge(&["build", "--config", path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(check(&report, "build")["data"]["dim"], 27);
    assert_eq!(report["config"]["structure"]["J"]["mu"], "1");
}
