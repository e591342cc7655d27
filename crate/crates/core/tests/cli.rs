use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnd")).args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn gen_one_clause(dir: &Path) -> String {
    let cnf = write(dir, "one_clause.cnf", "p cnf 3 1\n1 2 3 0\n");
    let out = dir.join("g1.json").to_str().unwrap().to_owned();
    let o = rnd(&["gen", "gamma", "--cnf", &cnf, "--rho", "1/2", "--gamma", "1", "-o", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_then_solve_dynamic_and_lagrange() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_one_clause(dir.path());
    let o = rnd(&["solve", "cong-dyn", &inst]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"beta":"3/2"}"#);

    let o = rnd(&["solve", "cong-lagrange", &inst, "--alpha", "1/1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["beta_tilde"], "3/2");
    assert!(v["iterations"].as_u64().unwrap() >= 1);

    let o = rnd(&["solve", "cong-static", &inst]);
    let v = stdout_json(&o);
    let beta: rnd_core::Rational = v["beta"].as_str().unwrap().parse().unwrap();
    assert!(beta >= "3/2".parse().unwrap());

    let o = rnd(&["solve", "lin-dyn", &inst]);
    assert!(stdout_json(&o)["value"].is_string());
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_one_clause(dir.path());
    let a = fs::read(&inst).unwrap();
    let inst2 = gen_one_clause(dir.path());
    assert_eq!(a, fs::read(inst2).unwrap());
    let x = rnd(&["solve", "lin-static", &inst]).stdout;
    let y = rnd(&["solve", "lin-static", &inst]).stdout;
    assert_eq!(x, y);
}

#[test]
fn verify_dichotomy_low_branch() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "contradict.cnf", "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n");
    let o = rnd(&["verify", "dichotomy", "--cnf", &cnf, "--rho", "3/5", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["branch"], "low");
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_cut_and_static() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "xyz.cnf", "p cnf 3 1\n1 2 3 0\n");
    let o = rnd(&["verify", "cut", "--cnf", &cnf, "--rho", "1/2", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = gen_one_clause(dir.path());
    let o = rnd(&["verify", "static", &inst]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = rnd(&["verify", "lagrange", &inst, "--alphas", "1,3/2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn report_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_one_clause(dir.path());
    let o = rnd(&["report", &inst]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
}

#[test]
fn errors_are_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "one.cnf", "p cnf 3 1\n1 2 3 0\n");
    let o = rnd(&["gen", "gamma", "--cnf", &cnf, "--rho", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());

    let bad = write(dir.path(), "bad.json", "{\"graph\":");
    let o = rnd(&["solve", "cong-dyn", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "json");

    let inst = gen_one_clause(dir.path());
    let o = rnd(&["solve", "cong-lagrange", &inst, "--max-iters", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "iteration-limit");

    let o = rnd(&["solve", "cong-one-path", &inst]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn twopath_and_hose_generators() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "one.cnf", "p cnf 3 1\n1 2 3 0\n");
    let o = rnd(&["gen", "twopath", "--cnf", &cnf, "--rho", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let inst = write(dir.path(), "tp.json", &String::from_utf8(o.stdout).unwrap());
    assert_eq!(stdout_json(&rnd(&["solve", "cong-dyn", &inst]))["beta"], "4/3");

    let graph = write(
        dir.path(),
        "tri.json",
        r#"{"node_count":3,"edges":[{"s":0,"t":1,"capacity":"1"},{"s":1,"t":2,"capacity":"1"},{"s":0,"t":2,"capacity":"1"}]}"#,
    );
    let out = dir.path().join("hose.json");
    let o = rnd(&["gen", "hose", "--graph", &graph, "--bounds", "1,1,1", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = rnd(&["solve", "cong-dyn", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}
