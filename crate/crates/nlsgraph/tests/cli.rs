use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlsgraph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

const COARSE: [&str; 4] = ["--truncation", "30", "--h", "0.1"];

#[test]
fn missing_graph_file() {
    let o = run(&["solve", "--graph", "/nonexistent/g.json"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR IO_NOT_FOUND:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_and_help() {
    let o = run(&["solve", "--bogus"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR USAGE:"), "{}", stderr(&o));
    let o = run(&["analyze"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR USAGE:"));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("scenario"));
}

#[test]
fn invalid_and_malformed_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"id":"e","from":"a","to":"a","length":1}]}"#,
    )
    .unwrap();
    let o = run(&["analyze", "--graph", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR INVALID_GRAPH:"), "{}", stderr(&o));
    fs::write(&bad, "{not json").unwrap();
    let o = run(&["analyze", "--graph", bad.to_str().unwrap()]);
    assert!(stderr(&o).starts_with("ERROR PARSE_ERROR:"));
}

#[test]
fn analyze_bridge() {
    let o = run(&["analyze", "--graph", data("graphs/bridge3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["satisfies_H"], true);
    assert_eq!(v["case_label"], "ASSUMPTION_H");
    assert_eq!(v["num_halflines"], 2);
    assert!(v["terminal_edges"].as_array().unwrap().is_empty());
}

#[test]
fn solve_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let g = data("graphs/tadpole.json");
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let mut args = vec!["solve", "--graph", g.to_str().unwrap(), "--p", "4", "--mass", "1", "--seed", "3"];
        args.extend(COARSE);
        args.extend(["--out", out.to_str().unwrap()]);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(fs::read(out.join("result.csv")).unwrap());
        let rep: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(rep["topology"]["case_label"], "SINGLE_HALFLINE");
        assert_eq!(rep["level_pinching"], true);
        assert_eq!(rep["config"]["seed"], 3);
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("edge,index,x,value\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn solve_csv_path_and_report_flag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let rep = dir.path().join("r.json");
    let mut args = vec!["solve", "--named", "line", "--out", csv.to_str().unwrap(), "--report", rep.to_str().unwrap()];
    args.extend(COARSE);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(csv.exists() && rep.exists());
}

#[test]
fn rearrange_and_restart_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let mut args = vec!["competitor", "--shape", "pendant", "--out", dir.path().to_str().unwrap()];
    args.extend(["--truncation", "60", "--h", "0.05"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|_| {
        serde_json::from_slice(&fs::read(dir.path().join("competitor.json")).unwrap()).unwrap()
    });
    assert!((rep["mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(rep["margin"].as_f64().unwrap() < 0.0);
    fs::rename(dir.path().join("competitor.csv"), &csv).unwrap();

    let rdir = dir.path().join("re");
    let o = run(&[
        "rearrange",
        "--input",
        csv.to_str().unwrap(),
        "--named",
        "pendant_line:1",
        "--out",
        rdir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let star = fs::read_to_string(rdir.join("u_star.csv")).unwrap();
    assert!(star.starts_with("x,value\n"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(rdir.join("rearrange.json")).unwrap()).unwrap();
    for row in summary["norms"].as_array().unwrap() {
        let (a, b) = (row[1].as_f64().unwrap(), row[2].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-8 * a.abs(), "{row}");
    }
    assert!(summary["kinetic_monotone"].as_f64().unwrap() <= summary["kinetic"].as_f64().unwrap() + 1e-12);

    // the same CSV against the wrong graph
    let o = run(&["rearrange", "--input", csv.to_str().unwrap(), "--named", "line"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("ERROR PARSE_ERROR:"));

    // and as an initial guess for the flow
    let mut args = vec![
        "solve",
        "--named",
        "pendant_line:1",
        "--init-from",
        csv.to_str().unwrap(),
        "--truncation",
        "60",
        "--h",
        "0.05",
    ];
    args.extend(["--restarts", "0"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep["trace"].as_array().unwrap().iter().any(|r| r["init"].as_str().unwrap().starts_with("file:")));
}

#[test]
fn sweep_csv_columns() {
    let o = run(&["sweep", "--family", "tadpole", "--grid", "2:4:2", "--truncation", "30", "--h", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,energy,omega,status,iterations,interpolant_energy,escaped"
    );
    assert_eq!(lines.count(), 2);
    let o = run(&["sweep", "--family", "tadpole"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn gn_prediction() {
    let o = run(&["gn", "--named", "tadpole:3", "--predict-only"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["predicted_mu_g"], "HALFLINE");
    assert_eq!(v["existence"]["kind"], "interval");
    let o = run(&["gn", "--named", "halfline", "--truncation", "40", "--h", "0.02"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mu = v["mu_g_estimate"].as_f64().unwrap();
    assert!((mu / (std::f64::consts::PI * 3f64.sqrt() / 4.0) - 1.0).abs() < 1e-2);
}

#[test]
fn profile6_csv() {
    let o = run(&["profile6", "--named", "line", "--masses", "1:3:2", "--truncation", "40", "--h", "0.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("mu,energy,status,regime,energy_refined,iterations\n"));
    assert!(text.lines().nth(2).unwrap().contains("UNBOUNDED_SUSPECTED"), "{text}");
}

#[test]
fn reference_and_corpus_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reference", "--p", "4", "--emit-corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["solitons"][0]["soliton_energy"].as_f64().unwrap() + 1.0 / 96.0).abs() < 1e-15);
    for entry in fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let shipped = data("graphs").join(path.file_name().unwrap());
        assert_eq!(fs::read(&path).unwrap(), fs::read(&shipped).unwrap(), "{}", shipped.display());
    }
}

#[test]
fn scenario_assertions_drive_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    fs::write(
        &file,
        r#"{"scenarios":[
            {"name":"ok","graph":{"catalogue":"halfline"},"p":4,"mu":1,
             "config":{"truncation_length":30,"h":0.1},
             "expected":{"energy":{"min":-0.0419,"max":-0.0414},"case_label":"TERMINAL"}},
            {"name":"wrong","graph":{"inline":{"vertices":[{"id":"o"},{"id":"w","infinity":true}],
                 "edges":[{"id":"h","from":"o","to":"w","halfline":true}]}},"p":4,"mu":1,
             "config":{"truncation_length":30,"h":0.1},
             "expected":{"energy":{"max":-0.05}}}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&["scenario", "run", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS ok"));
    assert!(text.contains("FAIL wrong"));
    assert!(stderr(&o).starts_with("ERROR ASSERTION_FAILED:"));
    assert!(out.join("ok/report.json").exists() && out.join("ok/result.csv").exists());
    let o = run(&[
        "scenario",
        "run",
        file.to_str().unwrap(),
        "--only",
        "ok",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn shipped_presets_parse() {
    let text = fs::read_to_string(data("presets.json")).unwrap();
    let file = nlsgraph::scenario::ScenarioFile::parse(&text).unwrap();
    assert!(file.scenarios.len() >= 10);
    assert!(file.scenarios.iter().all(|s| !s.description.is_empty()));
    for name in ["line_p4", "star3_nonexistence", "tadpole_p6_interval"] {
        assert!(file.scenarios.iter().any(|s| s.name == name), "{name}");
    }
}

#[test]
fn shipped_preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "scenario",
        "run",
        data("presets.json").to_str().unwrap(),
        "--only",
        "star3_nonexistence",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS star3_nonexistence"));
}
