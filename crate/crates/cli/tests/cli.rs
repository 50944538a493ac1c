//! End-to-end checks of the command-line surface: exit codes, config
//! diagnostics, and byte-stable reports across runs and thread counts.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_umbilic-lab"))
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn catalog_lists_known_entries() {
    let out = bin().arg("catalog").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "plane",
        "cylinder",
        "sphere2",
        "sphere3",
        "ellipsoid-1-1-2",
        "torus-2-1",
        "sphere2-in-R4",
        "clifford-in-S3",
        "veronese-in-S4",
    ] {
        assert!(text.contains(name), "missing {name} in catalog output");
    }
    assert!(text.contains("umbilic=true"));
}

#[test]
fn run_smoke_scenario_exits_zero() {
    let dir = tempdir("run-smoke");
    let out = bin()
        .args(["run", "--scenario", "smoke", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("report.json"))).unwrap();
    assert_eq!(report["all_consistent"], serde_json::Value::Bool(true));
    assert!(report["verdicts"].as_array().unwrap().len() == 1);
    let manifest: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("manifest.json"))).unwrap();
    assert!(manifest["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn malformed_json_config_exits_two_with_position() {
    let dir = tempdir("bad-json");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"name\": \"x\", \n \"entries\": [,]}").unwrap();
    let out = bin()
        .args(["run", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line") && err.contains("column"),
        "diagnostic should carry line/column: {err}"
    );
}

#[test]
fn unknown_scenario_exits_two() {
    let out = bin()
        .args(["run", "--scenario", "no-such-scenario"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_catalog_reference_exits_two() {
    let dir = tempdir("bad-entry");
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        r#"{"name": "x", "entries": ["not-a-surface"], "suites": ["COR"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["validate-config", "--scenario"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not-a-surface"));
}

#[test]
fn validate_config_accepts_builtins() {
    for name in ["sphere-mainth", "smoke", "veronese-thirdth"] {
        let out = bin()
            .args(["validate-config", "--scenario", name])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}

#[test]
fn inconsistent_verdict_exits_one() {
    // An absurd planarity threshold makes the sphere's (true) conclusion
    // unverifiable, so the recorded implication fails.
    let dir = tempdir("inconsistent");
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        r#"{
            "name": "forced-failure",
            "entries": ["sphere2"],
            "suites": ["COR"],
            "span": [-1.0, 1.0],
            "seed_points": 2,
            "seed_directions": 2,
            "grid_points": 4,
            "thresholds": {"planar": 1e-30, "reject": 1e-29},
            "export_trajectories": false
        }"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "--scenario"])
        .arg(&path)
        .args(["--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let d1 = tempdir("det-1");
    let d2 = tempdir("det-2");
    for (dir, threads) in [(&d1, "1"), (&d2, "4")] {
        let out = bin()
            .args(["run", "--scenario", "smoke", "--seed", "7", "--threads", threads, "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    assert_eq!(
        read(&d1.join("report.json")),
        read(&d2.join("report.json")),
        "reports differ across thread counts"
    );
    let mut names: Vec<_> = std::fs::read_dir(d1.join("trajectories"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        assert_eq!(
            read(&d1.join("trajectories").join(&name)),
            read(&d2.join("trajectories").join(&name)),
            "{name:?} differs"
        );
    }
}

#[test]
fn env_var_sets_thread_fallback() {
    let dir = tempdir("env-threads");
    let out = bin()
        .env("UMBILIC_LAB_THREADS", "2")
        .args(["run", "--scenario", "smoke", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("manifest.json"))).unwrap();
    assert_eq!(manifest["threads"], serde_json::json!(2));
}

#[test]
fn inline_immersion_runs_end_to_end() {
    // A custom surface defined purely in the config exercises the
    // expression grammar, symbolic differentiation, and the suite runner.
    let dir = tempdir("inline");
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        r#"{
            "name": "inline-cylinder",
            "inline_immersions": [{
                "name": "skew-cylinder",
                "vars": ["u", "v"],
                "components": ["cos(u)", "sin(u)", "v + 0.1*sin(u)"],
                "domain": [[-6.0, 6.0], [-6.0, 6.0]],
                "ambient": {"euclidean": {"dim": 3}}
            }],
            "suites": ["SecondTH"],
            "span": [-1.0, 1.0],
            "seed_points": 2,
            "seed_directions": 2,
            "grid_points": 4
        }"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "--scenario"])
        .arg(&path)
        .args(["--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("out/report.json"))).unwrap();
    assert_eq!(report["verdicts"][0]["entry"], serde_json::json!("skew-cylinder"));
    assert_eq!(report["all_consistent"], serde_json::Value::Bool(true));
}

#[test]
fn convergence_on_plane_reports_floor() {
    let dir = tempdir("conv-plane");
    let out = bin()
        .args([
            "convergence",
            "--entry",
            "plane",
            "--kind",
            "geodesic",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("floor"), "{text}");
}

#[test]
fn run_with_overrides_honors_step_flag() {
    let dir = tempdir("overrides");
    let out = bin()
        .args([
            "run",
            "--scenario",
            "smoke",
            "--step",
            "2e-3",
            "--span",
            "-1.0,1.0",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("report.json"))).unwrap();
    assert_eq!(report["config"]["step"].as_f64().unwrap(), 2e-3);
    assert_eq!(report["config"]["span"][1].as_f64().unwrap(), 1.0);
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "umbilic-lab-test-{tag}-{}",
        std::process::id()
    ));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
