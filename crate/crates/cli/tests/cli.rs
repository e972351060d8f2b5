use nmsp_core::graphs::{canonical, DecoratedGraph};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tmp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nmsp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn nmsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmsp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const ENUM_SPEC: &str = r#"{"schema_version": 1, "g": 0, "legs": ["rho", "rho", "rho"], "d0": "0", "n_hours": 2}"#;
const HHH: &str = r#"{"schema_version": 1, "g": 0, "n_hours": 2, "insertions": [1, 1, 1]}"#;

#[test]
fn enumerate_three_graphs_round_trip() {
    let spec = tmp("enum.json", ENUM_SPEC);
    let o = nmsp(&["enumerate", "--spec", spec.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    for l in lines {
        let mut v: Value = serde_json::from_str(&l).unwrap();
        assert_eq!(v["schema_version"], 1);
        let key = v["canonical"].as_str().unwrap().to_string();
        let o = v.as_object_mut().unwrap();
        o.remove("canonical");
        o.remove("regularity");
        let g = DecoratedGraph::from_json(&v).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(canonical(&g).key, key);
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let spec = tmp("hhh-det.json", HHH);
    let a = nmsp(&["correlator", "--spec", spec.to_str().unwrap(), "--workers", "1"]);
    let b = nmsp(&["correlator", "--spec", spec.to_str().unwrap(), "--workers", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn hhh_series_is_zero_with_the_line_count() {
    let spec = tmp("hhh.json", HHH);
    let table = tmp("gw.json", r#"{"GW[g=0;n=3;d=1;pts=0.1,0.1,0.1;segre=0,0]": "2875"}"#);
    let out = tmp("hhh-report.json", "");
    let o = nmsp(&[
        "correlator",
        "--spec",
        spec.to_str().unwrap(),
        "--oracle-table",
        table.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    let cs = r["coefficients"].as_array().unwrap();
    assert_eq!(cs.len(), 2);
    for c in cs {
        assert_eq!(c["known"].as_array().map(|t| t.len()), Some(0), "{}", c);
        assert_eq!(c["unknowns"].as_object().map(|u| u.len()), Some(0), "{}", c);
    }
    assert!(stdout(&o).contains("q^0"));
}

#[test]
fn forced_vanishing_failure_exits_4() {
    // the wrong restriction sign breaks the degree-0 cancellation
    let spec = tmp(
        "plus.json",
        r#"{"schema_version": 1, "g": 0, "n_hours": 1, "insertions": [1, 1, 1], "dmax": 0, "config": {"hour_sign": "plus"}}"#,
    );
    let o = nmsp(&["correlator", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn invalid_specs_exit_2() {
    let bad = tmp("bad.json", r#"{"schema_version": 7, "g": 0, "n_hours": 1, "insertions": [1, 1, 1]}"#);
    assert_eq!(nmsp(&["correlator", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
    let garbage = tmp("garbage.json", "not json");
    assert_eq!(nmsp(&["enumerate", "--spec", garbage.to_str().unwrap()]).status.code(), Some(2));
    let unstable = tmp("unstable.json", r#"{"schema_version": 1, "g": 0, "legs": ["rho"], "d0": "0", "n_hours": 1}"#);
    assert_eq!(nmsp(&["enumerate", "--spec", unstable.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn genus_two_needs_an_oracle() {
    // a genus-2 level-1 vertex needs Hodge integrals beyond the built-in range
    let spec = tmp("g2.json", r#"{"schema_version": 1, "g": 2, "n_hours": 1, "insertions": [1], "dmax": 0}"#);
    let o = nmsp(&["correlator", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn dot_has_ranked_levels() {
    let spec = tmp("enum-dot.json", ENUM_SPEC);
    let lines = tmp("graphs.jsonl", &stdout(&nmsp(&["enumerate", "--spec", spec.to_str().unwrap()])));
    let o = nmsp(&["dot", "--spec", lines.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(s.matches("graph theta {").count(), 3);
    assert!(s.contains("rank=same"));
    assert_eq!(s.matches('{').count(), s.matches('}').count());
}

#[test]
fn contrib_reports_the_level_zero_point() {
    let spec = tmp("enum-c.json", r#"{"schema_version": 1, "g": 0, "legs": ["rho", "rho", "rho"], "d0": "0", "n_hours": 1}"#);
    let first = stdout(&nmsp(&["enumerate", "--spec", spec.to_str().unwrap()])).lines().next().unwrap().to_string();
    let c = tmp("contrib.json", &format!(r#"{{"schema_version": 1, "graph": {}, "insertions": [1, 1, 1]}}"#, first));
    let o = nmsp(&["contrib", "--spec", c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["ledger"].is_array());
}

#[test]
fn quick_check_runs() {
    let out = tmp("check.json", "");
    let o = nmsp(&["check", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("criterion")).count(), 10);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 10);
}
