use std::path::Path;
use std::process::{Command, Output};

fn horizon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horizon")).args(args).output().unwrap()
}

fn horizon_to(out: &Path, args: &[&str]) -> (i32, String) {
    let mut all = vec!["--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    let o = horizon(&all);
    (o.status.code().unwrap(), std::fs::read_to_string(out).unwrap_or_default())
}

#[test]
fn passing_run_writes_json_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, body) = horizon_to(&out, &["verify", "curvature-perturbation", "--case", "timelike", "--n", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["tool"], "horizon");
    assert_eq!(v["signature"], "(-,+,...,+)");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn stdout_carries_the_report_without_out() {
    let o = horizon(&["classify", "--scenario", "minkowski_torus_quotient", "--surface", "Sigma"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"][0]["measured"], "Extremal");
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(horizon_to(&d.join("a.json"), &["classify", "--scenario", "minkowski_torus_quotient", "--surface", "Sigma", "--expect", "Trapped"]).0, 1);
    assert_eq!(horizon(&["classify", "--scenario", "no_such_scenario"]).status.code(), Some(2));
    assert_eq!(horizon(&["--tol", "nonsense=1", "linear"]).status.code(), Some(2));
    assert_eq!(horizon(&["--frobnicate"]).status.code(), Some(2));
    assert_eq!(horizon(&["constraints", "--scenario", "schwarzschild_slice_isotropic", "--m=-1"]).status.code(), Some(3));
}

#[test]
fn csv_output_has_nodal_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let (code, body) = horizon_to(&out, &["--format", "csv", "spectrum", "--scenario", "einstein_cylinder", "--n", "2", "--resolution", "32"]);
    assert_eq!(code, 0);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("coord1,value"));
    assert_eq!(lines.count(), 32);
}

#[test]
fn config_file_runs_are_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 11\n[operation]\nname = \"linear\"\nparams = { triples = 20, codim = 3, projections = 20 }\n",
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["wall_time"] = serde_json::json!(0.0);
        v
    };
    let (c1, a) = horizon_to(&out, &["--config", cfg.to_str().unwrap()]);
    let (c2, b) = horizon_to(&out, &["--config", cfg.to_str().unwrap()]);
    assert_eq!((c1, c2), (0, 0));
    assert!(strip(&a) == strip(&b));
    assert_eq!(strip(&a)["config"]["seed"], 11);
}
