use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lattes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const P2: &str = r#"{"group":"p2","L":[[2,0],[0,2]],"a":["0","0"]}"#;

#[test]
fn classify_p2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let o = lattes(&["classify", s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["signature"], "(2,2,2,2)");
    assert_eq!(v["parabolic"], true);
    assert_eq!(v["expanding"], true);
    assert_eq!(v["degree"], "4");
}

#[test]
fn classify_every_group() {
    let dir = TempDir::new().unwrap();
    for (group, l, sig) in [
        ("p3", "[[2,0],[0,2]]", "(3,3,3)"),
        ("p4", "[[1,1],[-1,1]]", "(2,4,4)"),
        ("p6", "[[2,0],[0,2]]", "(2,3,6)"),
    ] {
        let input = write(&dir, "d.json", &format!(r#"{{"group":"{group}","L":{l},"a":["0","0"]}}"#));
        let o = lattes(&["signature", s(&input)]);
        assert_eq!(o.status.code(), Some(0), "{group}");
        assert_eq!(stdout_json(&o)["signature"], sig);
    }
}

#[test]
fn fiber_degrees_sum_to_det() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", r#"{"group":"p4","L":[[2,0],[0,2]],"a":["0","0"]}"#);
    let v = stdout_json(&lattes(&["fiber", s(&input)]));
    let fibers = v["fibers"].as_array().unwrap();
    assert_eq!(fibers.len(), 3);
    assert!(fibers.iter().all(|f| f["degree_sum"] == 4));

    let input = write(&dir, "e.json", r#"{"group":"p2","L":[[2,0],[0,2]],"a":["0","0"],"point":["1/3","1/7"]}"#);
    let v = stdout_json(&lattes(&["fiber", s(&input)]));
    assert_eq!(v["fibers"][0]["points"].as_array().unwrap().len(), 4);
}

#[test]
fn deck_solve_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k.json", r#"{"group":"p4","x":["1/3","1/5"],"y":["-1/5","7/3"]}"#);
    let o = lattes(&["deck-solve", s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["k"], 1);
    assert_eq!(v["gamma"], serde_json::json!([0, 2]));

    let input = write(&dir, "n.json", r#"{"group":"p2","x":["1/3","0"],"y":["1/4","0"]}"#);
    let o = lattes(&["deck-solve", s(&input)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"].is_string());
}

#[test]
fn portrait_check_power_map() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "p.json",
        r#"{"points":["0","inf"],"next":{"0":"0","inf":"inf"},"deg":{"0":2,"inf":2}}"#,
    );
    let o = lattes(&["portrait-check", s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["signature"], "(inf,inf)");
    assert_eq!(v["parabolic"], true);
}

#[test]
fn portrait_without_critical_points_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.json", r#"{"points":["a","b"],"next":{"a":"b","b":"a"}}"#);
    let o = lattes(&["portrait-check", s(&input)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"].is_string());
}

#[test]
fn mesh_render_depth_zero() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let svg = dir.path().join("m.svg");
    let o = lattes(&["mesh-render", s(&input), "--depth", "0", "--out", s(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let stats = stdout_json(&o);
    assert_eq!(stats["cells"], 1);
    let d = stats["max_diam"].as_f64().unwrap();
    assert!((d - 2f64.sqrt()).abs() < 1e-11);
    let body = fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("<path").count(), 1);
}

#[test]
fn mesh_render_to_stdout() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let o = lattes(&["mesh-render", s(&input), "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = String::from_utf8(o.stdout).unwrap();
    assert_eq!(svg.matches("<path").count(), 16);
    let stats: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!((stats["max_diam"].as_f64().unwrap() - 2f64.sqrt() / 4.0).abs() < 1e-11);
}

#[test]
fn invalid_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"group":"p2","L":[[1,0],[0,1]],"a":["0","0"]}"#,
        r#"{"group":"p2","L":[[1,2],[2,4]],"a":["0","0"]}"#,
        r#"{"group":"p1","L":[[2,0],[0,2]],"a":["0","0"]}"#,
        r#"{"group":"p6","L":[[2,0],[0,2]],"a":["1/2","0"]}"#,
        r#"{"group":"p2","L":[[2,0],[0,2]]}"#,
        "not json",
    ];
    for body in cases {
        let input = write(&dir, "bad.json", body);
        let o = lattes(&["classify", s(&input)]);
        assert_eq!(o.status.code(), Some(1), "{body}");
        assert!(stdout_json(&o)["error"].is_string(), "{body}");
    }
    let o = lattes(&["classify", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn depth_only_for_mesh_render() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let o = lattes(&["classify", s(&input), "--depth", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"].as_str().unwrap().contains("--depth"));
    let o = lattes(&["mesh-render", s(&input), "--depth", "99"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_json_error() {
    let o = lattes(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"].is_string());
    assert_eq!(lattes(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", r#"{"group":"p2","L":[[2,-1],[-1,2]],"a":["0","0"]}"#);
    let a = lattes(&["verify", s(&input), "--samples", "25", "--seed", "9"]);
    let b = lattes(&["verify", s(&input), "--samples", "25", "--seed", "9", "--sequential"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["passed"], true);
    assert!(v["invariants"].as_array().unwrap().len() >= 10);
}

#[test]
fn classify_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", r#"{"group":"p4","L":[[1,1],[-1,1]],"a":["0","0"]}"#);
    let a = lattes(&["classify", s(&input)]);
    let b = lattes(&["classify", s(&input), "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let out = dir.path().join("r.json");
    let o = lattes(&["classify", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let direct = lattes(&["classify", s(&input)]);
    assert_eq!(fs::read(&out).unwrap(), direct.stdout);
    let v: Value = serde_json::from_slice(&direct.stdout).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
}

#[test]
fn falsified_invariant_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", P2);
    let args = ["verify", s(&input), "--samples", "10", "--n-max", "3", "--epsilon1", "0.01", "--epsilon2", "0.01"];
    let o = lattes(&args);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], false);
    let failed: Vec<_> = v["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["passed"] == false)
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["inverse-iterate contraction"]);
}
