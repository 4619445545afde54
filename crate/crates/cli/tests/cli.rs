use std::path::PathBuf;
use std::process::{Command, Output};

fn torquiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torquiv"))
        .args(args)
        .env_remove("TORQUIV_DB_PATH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torquiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn fano_describes_database_entries() {
    let o = torquiv(&["fano", "2", "4", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rays"].as_array().unwrap().len(), 6);
    assert_eq!(v["cl_rank"], 4);
    let o = torquiv(&["fano", "1", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("P1"));
    assert_eq!(code(&torquiv(&["fano", "9", "9"])), 2);
}

#[test]
fn quiver_text_matches_vertex_block_layout() {
    let o = torquiv(&["quiver", "--db", "2", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let block: Vec<&str> = text.lines().skip(1).take(4).map(str::trim).collect();
    assert_eq!(
        block,
        ["1 => {x_0x_1, x_3x_4}", "2 => {x_1x_2, x_4x_5}", "3 => {x_2x_3, x_0x_5}", "degree => {0, 0, 0, 0}"]
    );
}

#[test]
fn quiver_from_collection_file() {
    let coll = temp_file("beilinson.json", "[[0],[1],[2]]");
    let o = torquiv(&["quiver", "--db", "2", "0", "--collection", coll.to_str().unwrap(), "--out", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["arrows"].as_array().unwrap().len(), 6);
    assert_eq!(v["arrows"][0]["index"], 0);

    let dot = torquiv(&["quiver", "--db", "2", "0", "--out", "dot"]);
    assert_eq!(stdout(&dot).matches("->").count(), 6);

    let empty = temp_file("empty.json", "[]");
    assert_eq!(code(&torquiv(&["quiver", "--db", "2", "0", "--collection", empty.to_str().unwrap()])), 2);
}

#[test]
fn quiver_json_round_trips_through_check() {
    let o = torquiv(&["quiver", "--db", "2", "4", "--out", "json"]);
    let file = temp_file("dp6-quiver.json", &stdout(&o));
    let again = torquiv(&["quiver", "--db", "2", "4", "--quiver", file.to_str().unwrap(), "--out", "json"]);
    assert_eq!(stdout(&again), stdout(&o));
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4", "--quiver", file.to_str().unwrap()])), 0);
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4"])), 0);
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4", "--chain", "4,3,2,0"])), 0);
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4", "--twist", "1"])), 0);
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4", "--chain", "4,3,2,0", "--twist", "1"])), 0);
    let bad = temp_file("p2-bad.json", "[[0],[3]]");
    assert_eq!(code(&torquiv(&["check", "--db", "2", "0", "--collection", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&torquiv(&["check", "--db", "2", "4", "--chain", "3,2"])), 2);
    let o = torquiv(&["check", "--db", "2", "4", "--json"]);
    assert_eq!(stdout(&o).trim(), r#"{"strong_exceptional":true}"#);
}

#[test]
fn forbidden_listing() {
    let o = torquiv(&["forbidden", "--db", "2", "4"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "2 => {{0,1,2,3,4,5}}"));
    assert!(text.lines().next().unwrap().starts_with("1 => {{0,2},{0,3},{1,3},{0,1,3},{0,2,3},{0,4},{1,4},"));
    assert_eq!(stdout(&torquiv(&["forbidden", "--db", "2", "0"])).trim(), "2 => {{0,1,2}}");
    assert_eq!(stdout(&torquiv(&["forbidden", "--db", "1", "0"])).trim(), "1 => {{0,1}}");
    let o = torquiv(&["forbidden", "--db", "2", "0", "--json", "--cones"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cones"][0]["cones"][0]["w"], serde_json::json!([-3]));
}

#[test]
fn nef_exit_codes() {
    assert_eq!(code(&torquiv(&["nef", "--db", "2", "4", "--n", "2"])), 0);
    assert_eq!(code(&torquiv(&["nef", "--db", "2", "4", "--n", "0"])), 1);
    assert_eq!(code(&torquiv(&["nef", "--db", "2", "4"])), 2);
}

#[test]
fn oracle_table() {
    let o = torquiv(&["oracle", "--db", "2", "0", "--divisor", "-3,0,0", "--json"]);
    assert_eq!(stdout(&o).trim(), r#"{"divisor":[-3,0,0],"h":[0,0,1]}"#);
    let o = torquiv(&["oracle", "--db", "2", "0", "--divisor", "0,0,0"]);
    assert_eq!(stdout(&o), "h^0 = 1\nh^1 = 0\nh^2 = 0\n");
    let fan = temp_file("open.json", r#"{"dim": 2, "rays": [[1,0],[0,1]], "max_cones": [[0,1]]}"#);
    assert_eq!(code(&torquiv(&["oracle", "--fan", fan.to_str().unwrap(), "--divisor", "0,0"])), 2);
}

#[test]
fn fan_files() {
    let fan = temp_file(
        "p2.json",
        r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]}"#,
    );
    let o = torquiv(&["oracle", "--fan", fan.to_str().unwrap(), "--divisor", "2,0,0"]);
    assert_eq!(stdout(&o).lines().next(), Some("h^0 = 6"));
    assert_eq!(code(&torquiv(&["quiver", "--fan", fan.to_str().unwrap()])), 2);
}

#[test]
fn database_override_and_export() {
    let o = torquiv(&["export-db"]);
    assert_eq!(code(&o), 0);
    let path = temp_file("db.json", &stdout(&o));
    let again = torquiv(&["--db-path", path.to_str().unwrap(), "export-db"]);
    assert_eq!(stdout(&again), stdout(&o));

    let env = Command::new(env!("CARGO_BIN_EXE_torquiv"))
        .args(["fano", "2", "4"])
        .env("TORQUIV_DB_PATH", path.join("missing"))
        .output()
        .unwrap();
    assert_eq!(code(&env), 2);

    let mut db: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p2 = db.as_array_mut().unwrap().iter_mut().find(|e| e["name"] == "P2").unwrap();
    p2["collection"] = serde_json::json!([[0], [3]]);
    let broken = temp_file("broken.json", &db.to_string());
    assert_eq!(code(&torquiv(&["--db-path", broken.to_str().unwrap(), "fano", "2", "0"])), 2);
}

#[test]
fn output_is_deterministic() {
    let a = torquiv(&["quiver", "--db", "2", "4", "--json"]);
    let b = torquiv(&["quiver", "--db", "2", "4", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
