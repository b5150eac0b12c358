use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ccenum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccenum"))
        .args(args)
        .env_remove("CCENUM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_report(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join("report.json");
    let mut args = vec![
        "enumerate",
        "--n",
        "3",
        "--alpha",
        "1",
        "--masses",
        "1,1,1",
        "--starts",
        "300",
        "--seed",
        "5",
        "--output",
    ];
    let p = path.to_str().unwrap().to_string();
    args.push(&p);
    args.extend_from_slice(extra);
    let o = ccenum(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path
}

#[test]
fn bounds_outputs() {
    let o = ccenum(&["bounds", "--n", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "{\"n\":3,\"upper\":\"4270451687424\",\"lower\":\"3\",\"poincare\":[\"1\",\"3\",\"2\"]}\n"
    );
    let o = ccenum(&["bounds", "--n", "2"]);
    assert!(stdout(&o).contains("upper=150 lower=1"));
    let o = ccenum(&["bounds", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ccenum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ccenum(&["enumerate"]).status.code(), Some(2));
    assert_eq!(ccenum(&["bounds", "--n", "x"]).status.code(), Some(2));
    assert_eq!(
        ccenum(&["--threads", "0", "bounds", "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ccenum(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_mass_is_rejected() {
    let o = ccenum(&["enumerate", "--n", "3", "--alpha", "1", "--masses", "1,0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("mass must be nonzero"),
        "{}",
        stderr(&o)
    );
    assert!(o.stdout.is_empty());
    let o = ccenum(&["enumerate", "--n", "2", "--masses", "1,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("total mass must be nonzero"));
    let o = ccenum(&["enumerate", "--n", "3", "--masses", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_two_bodies() {
    let o = ccenum(&[
        "enumerate",
        "--n",
        "2",
        "--alpha",
        "0.5",
        "--masses",
        "1,3",
        "--starts",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    let r: f64 = classes[0]["distances"]["r12"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((r - 4f64.powf(1.0 / 2.5)).abs() < 1e-10);
    assert!((r - 1.741101).abs() < 1e-6);
    assert!(stderr(&o).contains("classes=1 nondegenerate=1 within_bounds=true"));
}

#[test]
fn report_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_report(dir.path(), &[]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["config"]["settings"]["seed"], 5);
    assert_eq!(report["summary"]["classes"], 5);
    let o = ccenum(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verified=5 passed=5 failed=0"));

    // a bare array of records is accepted too
    let bare = dir.path().join("bare.json");
    std::fs::write(&bare, serde_json::to_string(&report["classes"]).unwrap()).unwrap();
    assert_eq!(
        ccenum(&["verify", bare.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn tampered_report_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_report(dir.path(), &[]);
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report["classes"][2]["points"][0][1] = Value::String("0.05".into());
    std::fs::write(&path, serde_json::to_string_pretty(&report).unwrap()).unwrap();
    let o = ccenum(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("class 3: FAIL"));
    assert!(stdout(&o).contains("failed=1"));
}

#[test]
fn malformed_reports_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"classes\": [\n    {\"id\": 1,\n  ]\n}\n").unwrap();
    let o = ccenum(&["verify", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let path = write_report(dir.path(), &[]);
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report["classes"][0]["lambda"] = Value::Null;
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    let o = ccenum(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("record 0"), "{}", stderr(&o));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        ccenum(&["verify", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = write_report(dir.path(), &[]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let cfg_path = dir.path().join("config.json");
    let mut cfg = report["config"].clone();
    cfg.as_object_mut().unwrap().remove("output");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = ccenum(&["enumerate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let again: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(again["classes"], report["classes"]);

    std::fs::write(
        &cfg_path,
        "{\"n\": 3, \"alpha\": 1, \"masses\": [1,1,1], \"bogus\": 1}",
    )
    .unwrap();
    assert_eq!(
        ccenum(&["enumerate", "--config", cfg_path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_and_text_formats() {
    let o = ccenum(&[
        "enumerate",
        "--n",
        "3",
        "--starts",
        "200",
        "--seed",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("id,n,alpha,m1,m2,m3,x1,y1,x2,y2,x3,y3,r12,r13,r23,lambda"));
    let o = ccenum(&[
        "enumerate",
        "--n",
        "3",
        "--starts",
        "200",
        "--seed",
        "2",
        "--format",
        "text",
    ]);
    assert!(stdout(&o).ends_with("classes=5 nondegenerate=5 within_bounds=true\n"));
}

#[test]
fn collinear_rows() {
    let o = ccenum(&[
        "collinear",
        "--n",
        "4",
        "--alpha",
        "1",
        "--masses",
        "1,1,1,1",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["orderings"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["status"] == "converged"));
    let o = ccenum(&["collinear", "--n", "4"]);
    assert_eq!(stdout(&o).lines().count(), 13);
}

#[test]
fn fewnomial_dump() {
    let o = ccenum(&["fewnomial", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("E4 = r12 - Yt12"));
    assert!(text.ends_with("equations=6 degree3=3 degree1=3 k=6 khovanskii=4270451687424\n"));
    let o = ccenum(&["fewnomial", "--n", "2", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["khovanskii"], "150");
}

#[test]
fn sweep_reports_counts() {
    let o = ccenum(&[
        "sweep",
        "--n",
        "3",
        "--starts",
        "200",
        "--alpha-lo",
        "0",
        "--alpha-hi",
        "2",
        "--steps",
        "2",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"], serde_json::json!([5, 5, 5]));
    assert_eq!(v["tracks"].as_array().unwrap().len(), 5);
    let o = ccenum(&["sweep", "--n", "3", "--alpha-lo", "2", "--alpha-hi", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let base = ["enumerate", "--n", "3", "--starts", "300", "--seed", "9"];
    let a = Command::new(env!("CARGO_BIN_EXE_ccenum"))
        .args(base)
        .env("CCENUM_THREADS", "1")
        .output()
        .unwrap();
    let b = ccenum(&[
        "--threads",
        "3",
        "enumerate",
        "--n",
        "3",
        "--starts",
        "300",
        "--seed",
        "9",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
