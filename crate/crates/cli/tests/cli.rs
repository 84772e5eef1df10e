use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn indset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn write_graph(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let out = indset(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn oracle_counts_cycle_and_complete_graph() {
    let dir = TempDir::new().unwrap();
    let c8 = write_graph(dir.path(), "c8.txt", &["--kind", "cycle", "--m", "8"]);
    let k22 = write_graph(dir.path(), "k22.txt", &["--kind", "complete", "--d", "2"]);
    let v = json(&indset(&["count", "--mode", "oracle", "-g", &c8]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["value"], "47");
    assert_eq!(v["result"]["rel_error_bound"], 0.0);
    assert_eq!(v["config"]["c1"], 100.0);
    let v = json(&indset(&["count", "--mode", "oracle", "-g", &k22]));
    assert_eq!(v["result"]["value"], "7");
    let v = json(&indset(&["count", "--mode", "oracle", "-g", &k22, "--lambda", "1/2"]));
    assert_eq!(v["result"]["value"], "7/2");
    assert_eq!(v["result"]["decimal"], "3.5");
}

#[test]
fn invalid_graph_reports_line_and_exit_code() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "p bis 2 2 2\ne 0 0\ne 0 1\ne 1 0\n").unwrap();
    let out = indset(&["count", "--mode", "oracle", "-g", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.txt:1"), "{err}");
    assert_eq!(json(&out)["error"]["kind"], "invalid_input");

    let missing = indset(&["count", "-g", "/nonexistent/graph.txt"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn float_fugacity_needs_flag() {
    let dir = TempDir::new().unwrap();
    let k22 = write_graph(dir.path(), "k22.txt", &["--kind", "complete", "--d", "2"]);
    let out = indset(&["count", "--mode", "expander", "-g", &k22, "--lambda", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = indset(&["count", "--mode", "expander", "-g", &k22, "--lambda", "1e-3", "--float-lambda"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn capacity_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let g = write_graph(dir.path(), "r.txt", &["--kind", "random", "--n", "30", "--d", "3", "--seed", "1"]);
    let out = indset(&["check-expander", "-g", &g, "--cap", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["kind"], "capacity");
}

#[test]
fn expander_and_general_modes() {
    let dir = TempDir::new().unwrap();
    let c8 = write_graph(dir.path(), "c8.txt", &["--kind", "cycle", "--m", "8"]);
    let v = json(&indset(&["count", "--mode", "expander", "-g", &c8, "--eps", "0.5", "--c1", "1"]));
    assert_eq!(v["result"]["value"], "47");
    assert_eq!(v["result"]["method"], "brute");
    let v = json(&indset(&[
        "count", "--mode", "expander", "-g", &c8, "--eps", "0.5", "--c1", "1", "--strategy", "expansion",
        "--dump-clusters",
    ]));
    assert_eq!(v["result"]["method"], "expander-CE");
    assert!(v["result"]["clusters"]["total"].as_u64().unwrap() > 0);
    let v = json(&indset(&["count", "--mode", "general", "--exact", "-g", &c8, "--c1", "1"]));
    assert_eq!(v["result"]["value"], "47");
    assert_eq!(v["result"]["census"]["families"], 2);
    let v = json(&indset(&["count", "--mode", "general", "-g", &c8, "--seed", "3"]));
    let est = v["result"]["log_value"].as_f64().unwrap().exp();
    assert!((est / 47.0 - 1.0).abs() < 0.2, "{est}");
}

#[test]
fn replay_reproduces_numbers() {
    let dir = TempDir::new().unwrap();
    let c8 = write_graph(dir.path(), "c8.txt", &["--kind", "cycle", "--m", "8"]);
    let first = dir.path().join("first.json");
    let out = indset(&["count", "--mode", "general", "-g", &c8, "--seed", "11", "-o", first.to_str().unwrap()]);
    assert!(out.status.success());
    let second = dir.path().join("second.json");
    let out = indset(&["replay", first.to_str().unwrap(), "-o", second.to_str().unwrap()]);
    assert!(out.status.success());
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let (original, replayed) = (read(&first), read(&second));
    assert_eq!(original["result"], replayed["result"]);
    assert_eq!(original["seed"], 11);
}

#[test]
fn sampling_is_reproducible_and_independent() {
    let dir = TempDir::new().unwrap();
    let c8 = write_graph(dir.path(), "c8.txt", &["--kind", "cycle", "--m", "8"]);
    for mode in ["oracle", "expander"] {
        let args = ["sample", "--mode", mode, "-g", &c8, "--samples", "50", "--seed", "9", "--c1", "1"];
        let a = json(&indset(&args));
        let b = json(&indset(&args));
        assert_eq!(a["result"]["samples"], b["result"]["samples"]);
        let graph = std::fs::read_to_string(&c8).unwrap();
        let edges: Vec<(u64, u64)> = graph
            .lines()
            .filter_map(|l| l.strip_prefix("e "))
            .map(|l| {
                let mut it = l.split_whitespace().map(|t| t.parse().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        for s in a["result"]["samples"].as_array().unwrap() {
            let xs: Vec<u64> = s["x"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            let ys: Vec<u64> = s["y"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            assert!(!edges.iter().any(|(x, y)| xs.contains(x) && ys.contains(y)));
        }
    }
}

#[test]
fn certify_verify_kp_and_bench() {
    let dir = TempDir::new().unwrap();
    let q3 = write_graph(dir.path(), "q3.txt", &["--kind", "hypercube", "--d", "3"]);
    let v = json(&indset(&["certify", "-g", &q3, "-t", "2"]));
    assert_eq!(v["result"]["total"], "35");
    assert_eq!(v["result"]["identity_holds"], true);
    let v = json(&indset(&["verify-kp", "-g", &q3, "--family", "small", "--lambda", "1/4", "--cap", "2"]));
    assert!(!v["result"]["entries"].as_array().unwrap().is_empty());
    let v = json(&indset(&["check-expander", "-g", &q3, "--alpha", "0.5"]));
    assert!(v["result"]["verdict"].is_string());
    let out = indset(&["bench", "--instances", "cycle:8,hypercube:3", "--modes", "oracle,expander"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("instance,n,d,mode"));
    assert!(lines[1].starts_with("cycle:8,4,2,oracle,3.850147601710"));
}

#[test]
fn generated_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let t = write_graph(dir.path(), "t.txt", &["--kind", "torus", "--dims", "4,4"]);
    let v = json(&indset(&["count", "--mode", "oracle", "-g", &t]));
    assert_eq!(v["result"]["graph"]["d"], 4);
    let out = indset(&["gen", "--kind", "random", "--n", "6", "--d", "3", "--seed", "2"]);
    let again = indset(&["gen", "--kind", "random", "--n", "6", "--d", "3", "--seed", "2"]);
    assert_eq!(out.stdout, again.stdout);
}
