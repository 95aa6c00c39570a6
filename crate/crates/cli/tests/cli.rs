// Copyright 2026 The emunoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn recipe(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("recipes").join(name)
}

fn emunoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emunoc"))
        .args(args)
        .env("EMUNOC_LOG", "info")
        .output()
        .expect("spawn emunoc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_uniform_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u");
    let o = emunoc(&["--config", s(&recipe("uniform_5x5.toml")), "--out-dir", s(&out), "run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("Completed: "), "{}", stdout(&o));
    for f in ["summary.json", "packets.csv", "injection_frames.bin", "ejection_frames.bin"] {
        assert!(out.join(f).metadata().unwrap().len() > 0, "{f}");
    }
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["num_vcs"], 2);
    assert_eq!(json["config"]["buffer_depth"], 8);
    assert_eq!(json["packets"], json["received"]);
    let rows = std::fs::read_to_string(out.join("packets.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows as u64, json["packets"].as_u64().unwrap());
}

#[test]
fn run_trace_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let o = emunoc(&["--config", s(&recipe("trace_8x8.toml")), "--out-dir", s(dir.path()), "run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["width"], 8);
    assert_eq!(json["config"]["buffer_depth"], 3);
    assert_eq!(json["received"], 68);
    assert_eq!(json["stop_reason"], "completed");
}

#[test]
fn missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(recipe("uniform_5x5.toml")).unwrap().replace("num_vcs = 2\n", "");
    std::fs::write(&cfg, text).unwrap();
    let o = emunoc(&["--config", s(&cfg), "--out-dir", s(dir.path()), "run"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("noc.num_vcs"), "{}", stderr(&o));

    let o = emunoc(&["--config", s(&recipe("uniform_5x5.toml")), "--set", "noc.buffer_depth=deep", "run"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("noc.buffer_depth"), "{}", stderr(&o));
}

#[test]
fn gen_uniform_zero_rate_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("zero.trace");
    let o = emunoc(&["--config", s(&recipe("uniform_5x5.toml")), "--set", "traffic.flit_rate=0", "gen", "--out", s(&t)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&t).unwrap(), "emunoc-trace v1 nodes=25 packets=0\n");
}

#[test]
fn gen_cnn_sparsity_sweep_writes_one_trace_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = emunoc(&[
        "--config",
        s(&recipe("cnn_snake_5x5.toml")),
        "--set",
        "traffic.duration=2000",
        "gen",
        "--out",
        s(dir.path()),
        "--sparsity-sweep",
        "0.5:0.95:0.05",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 10);
    assert!(files[0].ends_with("cnn_sparsity_0.5.trace"));
    for f in &files {
        let v = emunoc(&["validate-trace", s(f)]);
        assert!(v.status.success(), "{}", stderr(&v));
    }
}

#[test]
fn gen_then_run_consumes_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("u.trace");
    let o = emunoc(&["--config", s(&recipe("uniform_5x5.toml")), "--set", "traffic.duration=500", "gen", "--out", s(&t)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = std::fs::read_to_string(&t).unwrap();
    let packets: usize = header.lines().next().unwrap().rsplit('=').next().unwrap().parse().unwrap();
    assert!(packets > 0);
    let o = emunoc(&[
        "--config",
        s(&recipe("uniform_5x5.toml")),
        "--set",
        "traffic.kind=\"trace\"",
        "--set",
        &format!("traffic.path={}", s(&t)),
        "--set",
        "traffic.flit_rate=0",
        "--out-dir",
        s(&dir.path().join("run")),
        "run",
    ]);
    // flit_rate is not a trace key but is still a known key, so it is accepted.
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains(&format!("{packets}/{packets} packets")), "{}", stdout(&o));
}

#[test]
fn sparsity_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = emunoc(&[
        "--config",
        s(&recipe("cnn_snake_5x5.toml")),
        "--set",
        "traffic.duration=5000",
        "sweep",
        "--variable",
        "sparsity",
        "--values",
        "0.5:0.95:0.05",
        "--out",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("point,max_latency,mean_latency,"));
    assert_eq!(lines.len(), 11);
    let points: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(points, ["0.5", "0.55", "0.6", "0.65", "0.7", "0.75", "0.8", "0.85", "0.9", "0.95"]);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn flit_rate_sweep_latency_rises() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = emunoc(&[
        "--config",
        s(&recipe("uniform_5x5.toml")),
        "--set",
        "traffic.duration=20000",
        "sweep",
        "--variable",
        "flit_rate",
        "--values",
        "0.01,0.1",
        "--out",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mean: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(mean[1] > mean[0], "{mean:?}");
}

#[test]
fn sweep_errors() {
    let o = emunoc(&["--config", s(&recipe("uniform_5x5.toml")), "sweep", "--variable", "flit_rate", "--values", ""]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("empty sweep list"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let o = emunoc(&[
        "--config",
        s(&recipe("uniform_5x5.toml")),
        "--set",
        "traffic.duration=200",
        "sweep",
        "--variable",
        "flit_rate",
        "--values",
        "0.05,2",
        "--out",
        s(&csv),
    ]);
    assert!(!o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().ends_with(",ok"));
    assert!(text.lines().nth(2).unwrap().contains("error"));
}

#[test]
fn mesh_size_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let o = emunoc(&[
        "--config",
        s(&recipe("uniform_5x5.toml")),
        "--set",
        "traffic.duration=1000",
        "sweep",
        "--variable",
        "mesh_size",
        "--values",
        "3:5:1",
        "--out",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
}

#[test]
fn validate_trace_reports_errors_with_lines() {
    let ok = emunoc(&["validate-trace", s(&recipe("request_reply_8x8.trace"))]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert!(stdout(&ok).starts_with("ok: 68 packets, 64 nodes"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trace");
    std::fs::write(&bad, "emunoc-trace v1 nodes=4 packets=2\n0 0 0 1 5\n1 0 1 2 5 9\n").unwrap();
    let o = emunoc(&["validate-trace", s(&bad)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn seed_flag_changes_the_workload() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = emunoc(&[
            "--config",
            s(&recipe("uniform_5x5.toml")),
            "--set",
            "traffic.duration=1000",
            "--seed",
            seed,
            "--out-dir",
            s(&out),
            "run",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("packets.csv")).unwrap()
    };
    assert_eq!(run("7", "a"), run("7", "b"));
    assert_ne!(run("7", "a"), run("8", "c"));
}

#[test]
fn max_cycle_flag_truncates() {
    let dir = tempfile::tempdir().unwrap();
    let o = emunoc(&[
        "--config",
        s(&recipe("uniform_5x5.toml")),
        "--max-cycle",
        "300",
        "--out-dir",
        s(dir.path()),
        "run",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("MaxCycle: "), "{}", stdout(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["stop_reason"], "max_cycle");
    assert!(json["received"].as_u64().unwrap() < json["packets"].as_u64().unwrap());
}
