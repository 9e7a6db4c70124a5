use std::path::Path;
use std::process::{Command, Output};

fn pebble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pebble"))
        .args(args)
        .env_remove("PEBBLE_NODE_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_prints_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = pebble(&["construct", "--length", "7", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "depth=14 space=4 cost=17");
    let v = pebble(&["validate", path_str(&out)]);
    assert_eq!(code(&v), 0);
    let rep: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(rep["valid"], true);
    assert_eq!(rep["depth"], 14);
}

#[test]
fn search_reports_depth_and_writes_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = pebble(&["search", "--length", "6", "--pebbles", "3", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("depth="), "{text}");
    assert_eq!(code(&pebble(&["validate", path_str(&out)])), 0);

    let j = pebble(&["search", "--length", "6", "--pebbles", "3", "--format", "json", "--tie-break", "none"]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert!(text.contains(&format!("depth={} ", r["optimal_depth"])));
}

#[test]
fn search_with_weight_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    std::fs::write(
        &w,
        r#"{"default_site_weight": "1", "transient": [{"mod": 3, "residue": 1, "weight": "1"}]}"#,
    )
    .unwrap();
    let o = pebble(&[
        "search",
        "--length",
        "7",
        "--pebbles",
        "4",
        "--variant",
        "measured_target",
        "--weights",
        path_str(&w),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    // bad flags
    assert_eq!(code(&pebble(&["construct", "--length", "0"])), 2);
    assert_eq!(code(&pebble(&["search", "--length", "5"])), 2);
    // infeasible budget
    assert_eq!(code(&pebble(&["search", "--length", "20", "--pebbles", "1"])), 3);
    // node cap
    assert_eq!(code(&pebble(&["search", "--length", "20", "--pebbles", "6", "--node-cap", "50"])), 4);
    // unknown beta
    assert_eq!(code(&pebble(&["estimate", "--n", "2048", "--beta", "61", "--pebbles", "12"])), 2);
    // missing file
    assert_eq!(code(&pebble(&["validate", "/nonexistent/schedule.json"])), 1);
}

#[test]
fn invalid_and_malformed_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"length": 3, "variant": "plain", "steps": [{"moves":[{"op":"pebble","i":2}],"ghosts":[]}]}"#,
    )
    .unwrap();
    let o = pebble(&["validate", path_str(&bad)]);
    assert_eq!(code(&o), 5);
    assert_eq!(code(&pebble(&["metrics", path_str(&bad)])), 5);

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"length\": 3, \"steps\": [").unwrap();
    assert_eq!(code(&pebble(&["validate", path_str(&junk)])), 1);
}

#[test]
fn metrics_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(code(&pebble(&["construct", "--length", "3", "--out", path_str(&out)])), 0);
    let o = pebble(&["metrics", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,space,weighted_space,cost"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn estimate_table_and_construction() {
    let o = pebble(&["estimate", "--n", "2048", "--beta", "160", "--pebbles", "12", "--strategy", "table"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("n,beta,window,pebbles,length"));
    assert!(text.contains("94,242,54,157,253,14.5"), "{text}");

    let o =
        pebble(&["estimate", "--n", "2048,4096", "--beta", "120,200", "--pebbles", "12", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert!(rows.as_array().unwrap().iter().all(|r| r["strategy"] == "construction"));
}
