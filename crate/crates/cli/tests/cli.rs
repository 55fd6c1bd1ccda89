use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const SONG: &str = r#"{
  "states": ["u1", "u2", "u3", "m1", "m2", "m3"],
  "edges": [
    {"from": "u1", "to": "u2"},
    {"from": "u2", "to": "u3"},
    {"from": "u3", "to": "m1"}, {"from": "u3", "to": "m2"},
    {"from": "m1", "to": "m2"}, {"from": "m1", "to": "m3"},
    {"from": "m2", "to": "m1"}, {"from": "m2", "to": "m3"},
    {"from": "m3", "to": "m1"}, {"from": "m3", "to": "m2"}, {"from": "m3", "to": "u1"}
  ],
  "chunks": {"u1": 0, "u2": 0, "u3": 0, "m1": 1, "m2": 1, "m3": 1},
  "fixed": ["u1", "u2"]
}
"#;

fn chunklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chunklab"))
        .args(args)
        .env_remove("CHUNKLAB_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_report(out: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec!["run", "--problem", "fixed_chunks", "--trials", "3", "--steps", "5000", "--out"];
    let out_str = out.to_str().unwrap();
    args.push(out_str);
    args.extend_from_slice(extra);
    let o = chunklab(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn run_writes_a_report_with_a_stable_hash() {
    let dir = tempdir().unwrap();
    let a = run_report(&dir.path().join("a.json"), &["--seed", "4"]);
    let b = run_report(&dir.path().join("nested/b.json"), &["--seed", "4"]);
    assert_eq!(a["trials"].as_array().unwrap().len(), 3);
    assert_eq!(a["summaries"][0]["n"], 3);
    assert_eq!(a["determinism_hash"], b["determinism_hash"]);
    let c = run_report(&dir.path().join("c.json"), &["--seed", "5"]);
    assert_ne!(a["determinism_hash"], c["determinism_hash"]);
}

#[test]
fn run_accepts_every_negative_rule_and_alpha_mode() {
    let dir = tempdir().unwrap();
    for rule in ["eq8", "attract", "dipole"] {
        let path = dir.path().join(format!("{rule}.json"));
        let r = run_report(&path, &["--negative-rule", rule, "--alpha-mode", "out", "--dims", "2"]);
        assert_eq!(r["config"]["dynamics"]["dims"], 2);
    }
}

#[test]
fn parser_runs_through_the_same_command() {
    let dir = tempdir().unwrap();
    let r = run_report(&dir.path().join("p.json"), &["--method", "parser"]);
    assert_eq!(r["label"], "parser");
}

#[test]
fn user_graph_files_run_end_to_end() {
    let dir = tempdir().unwrap();
    let graph = dir.path().join("song.json");
    std::fs::write(&graph, SONG).unwrap();
    let problem = format!("graph:{}", graph.display());
    let out = dir.path().join("song_report.json");
    let o = chunklab(&[
        "run", "--problem", &problem, "--trials", "2", "--steps", "5000", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["states"].as_array().unwrap().len(), 6);

    let o = chunklab(&["validate-graph", graph.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("6 states"));
}

#[test]
fn bad_inputs_exit_nonzero_with_a_diagnostic() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"states":["a","b"],"edges":[{"from":"a","to":"zz"}],"chunks":{"a":0,"b":0}}"#).unwrap();
    let o = chunklab(&["validate-graph", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bad.json"), "{}", stderr(&o));

    let out = dir.path().join("r.json");
    let o = chunklab(&["run", "--problem", "no_such_problem", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"));
    assert!(!out.exists());

    let o = chunklab(&["run", "--problem", "fixed_chunks", "--radius", "-1", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());

    let o = chunklab(&["validate-graph", dir.path().join("missing.json").to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_chunklab"))
        .args(["run", "--problem", "fixed_chunks", "--trials", "1", "--steps", "1000", "--out"])
        .arg(&out)
        .env("CHUNKLAB_THREADS", "0")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(stderr(&o).contains("CHUNKLAB_THREADS"), "{}", stderr(&o));

    let o = Command::new(env!("CARGO_BIN_EXE_chunklab"))
        .args(["run", "--problem", "fixed_chunks", "--trials", "2", "--steps", "1000", "--out"])
        .arg(&out)
        .env("CHUNKLAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn exported_csv_and_svg_agree_on_labels() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("map.csv");
    let svg = dir.path().join("map.svg");
    let common = ["--problem", "fixed_chunks", "--seed", "2", "--steps", "5000"];
    for (path, format) in [(&csv, "csv"), (&svg, "svg")] {
        let mut args = vec!["export-map", "--format", format, "--out", path.to_str().unwrap()];
        args.extend_from_slice(&common);
        let o = chunklab(&args);
        assert!(o.status.success(), "{}", stderr(&o));
    }

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("state,label,dim0,dim1,dim2"));
    let csv_labels: HashMap<String, String> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5);
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    assert_eq!(csv_labels.len(), 12);

    let svg_text = std::fs::read_to_string(&svg).unwrap();
    let markers: Vec<&str> = svg_text.lines().filter(|l| l.contains(r#"class="state""#)).collect();
    assert_eq!(markers.len(), 12);
    let attr = |line: &str, name: &str| {
        let start = line.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        line[start..].split('"').next().unwrap().to_string()
    };
    let mut color_of_label = HashMap::new();
    for m in markers {
        let state = attr(m, "data-state");
        let label = attr(m, "data-label");
        assert_eq!(csv_labels[&state], label, "state {state}");
        let fill = attr(m, "fill");
        assert_eq!(color_of_label.entry(label.clone()).or_insert(fill.clone()), &fill);
        if label == "-1" {
            assert_eq!(fill, "#000000");
        }
    }
}

#[test]
fn sweep_creates_its_output_directory() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("sweep/out");
    let o = chunklab(&[
        "sweep", "--problems", "fixed_chunks,continual_fixed", "--trials", "2", "--steps", "2000", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["grid"].as_array().unwrap().len(), 8);
    assert_eq!(json["entries"].as_array().unwrap().len(), 16);
    assert!(out.join("sweep.txt").exists());
}

#[test]
fn bench_and_compare() {
    let dir = tempdir().unwrap();
    let bench = dir.path().join("bench.json");
    let o = chunklab(&[
        "bench", "--methods", "syncmap,parser", "--trials", "2", "--steps", "3000", "--out", bench.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&bench).unwrap()).unwrap();
    assert_eq!(b["rows"].as_array().unwrap().len(), 2);

    let s = dir.path().join("s.json");
    let p = dir.path().join("p.json");
    run_report(&s, &[]);
    run_report(&p, &["--method", "parser"]);
    let o = chunklab(&["compare", s.to_str().unwrap(), p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("parser") && text.contains("syncmap"));
}
