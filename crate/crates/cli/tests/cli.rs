use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn proctensor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proctensor"))
        .args(args)
        .env_remove("PROCTENSOR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn demo_app_c() {
    let o = proctensor(&["demo", "appC"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("computed  iCP: yes, oCP: no, non-signalling: no, Markov: no"));
}

#[test]
fn demo_app_b() {
    let o = proctensor(&["demo", "appB"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("computed  non-signalling: yes, oCP: no"));
}

#[test]
fn demo_fig2a() {
    let o = proctensor(&["demo", "fig2a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("computed ocp_nonmarkovian"));
}

#[test]
fn classify_builtin_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = proctensor(&["classify", "builtin:fig2a-bell", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("label     ocp_nonmarkovian"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["label"], "ocp_nonmarkovian");
    assert_eq!(report["scenario_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn classify_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let v = proctensor::make_app_b().unwrap().to_json().unwrap();
    let path = write_json(dir.path(), "appb.json", &v);
    let o = proctensor(&["classify", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("label     cond_nonsignalling_only"));
}

#[test]
fn bad_input_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = proctensor::make_app_b().unwrap().to_json().unwrap();
    v.as_object_mut().unwrap().remove("eta");
    let path = write_json(dir.path(), "missing.json", &v);
    let o = proctensor(&["classify", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`eta`"), "{}", stderr(&o));

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{ not json").unwrap();
    let o = proctensor(&["classify", garbled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not valid JSON"));

    assert_eq!(proctensor(&["classify", "builtin:appB", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(proctensor(&["classify", "builtin:unknown"]).status.code(), Some(2));
    assert_eq!(proctensor(&["demo", "appD"]).status.code(), Some(2));
}

#[test]
fn sweep_is_ordered_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = proctensor(&[
            "sweep", "--builtin", "partial-swap", "--param", "omega_t", "--range", "0:1.55:0.25", "--grid", "5", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,icp_min_eig,ocp_residual,nonsig_residual,markov_residual,label"
    );
    let params: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(params.len(), 7);
    assert!(params.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_rejects_bad_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = proctensor(&["sweep", "--range", "1:0:0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("range"));
}

#[test]
fn selftest_honours_seed() {
    let o = Command::new(env!("CARGO_BIN_EXE_proctensor"))
        .args(["selftest", "--scenarios", "4", "--triples", "2"])
        .env("PROCTENSOR_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("seed 17: 4 scenarios"));
}
