use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abctile")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_with_node_count() {
    let o = run(&["verify", "1", "2", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("I nodes: 55"));
}

#[test]
fn verify_json_is_machine_readable() {
    let o = run(&["verify", "1", "2", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
}

#[test]
fn verify_fails_for_non_fourteen_instance() {
    let o = run(&["verify", "1", "2", "3", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn neighbors_warns_on_non_fourteen() {
    let o = run(&["neighbors", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a 14-neighbor instance"));
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["igraph", "1", "2", "--bad-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&["partition", "1", "2", "4", "--depth", "9"]).status.code(), Some(2));
    assert_eq!(run(&["hata", "3", "2", "4"]).status.code(), Some(2));
    assert_eq!(run(&["partition", "1", "2", "4", "--seq", "2,5"]).status.code(), Some(2));
}

#[test]
fn hata_dot_sizes() {
    let o = run(&["hata", "1", "2", "4", "--format", "dot"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 14);
    assert_eq!(text.lines().filter(|l| l.contains(" -- ")).count(), 36);
}

#[test]
fn classify_annulus() {
    let o = run(&["classify", "1", "2", "4", "S\\{P,-P}", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["topology"], "ribbon");
}

#[test]
fn render_to_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ply");
    let o = run(&["render", "1", "2", "4", "--depth", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("element vertex 64"));
    let a = run(&["render", "1", "3", "6", "--depth", "2", "--boundary", "--format", "csv"]);
    let b = run(&["render", "1", "3", "6", "--depth", "2", "--boundary", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("x_num,x_den,y_num,y_den,z_num,z_den,label"));
}

#[test]
fn partition_and_order_check() {
    let o = run(&["partition", "1", "2", "4", "--kind", "p", "--depth", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["atoms"], 17);
    let o = run(&["order-check", "1", "2", "4", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certified"));
}

#[test]
fn igraph_lists_table_names() {
    let o = run(&["igraph", "1", "3", "6", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 57);
    assert!(nodes.iter().all(|n| n["name"].is_string()));
}
