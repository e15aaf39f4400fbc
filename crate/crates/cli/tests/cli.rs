use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ibvs-dock"));
    c.env_remove("IBVS_DOCK_OUT");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
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

#[test]
fn nominal_run_docks_and_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["run", "--out", out, "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("nominal-4.csv")).unwrap();
    let outcome = fs::read_to_string(dir.path().join("nominal-4.outcome.txt")).unwrap();
    assert!(csv.starts_with("# ibvs-docking-log/1\n"));
    assert!(csv.contains("# seed: 4\n"));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("time,"));
    assert!(outcome.contains("result: docked"));
}

#[test]
fn pbvs_with_pose_error_fails_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "run",
        "--controller",
        "pbvs",
        "--pose-error",
        "1,0,-0.5",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let outcome = fs::read_to_string(dir.path().join("nominal-1.outcome.txt")).unwrap();
    assert!(outcome.contains("result: failed"));
    let miss: f64 = outcome
        .lines()
        .find_map(|l| l.strip_prefix("miss_distance_m: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(miss > 0.15);
    let csv = fs::read_to_string(dir.path().join("nominal-1.csv")).unwrap();
    assert!(csv.contains("# overrides: controller=pbvs pose_error=1,0,-0.5\n"));
}

#[test]
fn ibvs_with_same_pose_error_docks() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        configs().join("pose_error_ibvs.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = run(&[
            "run",
            "--turbulence",
            "2",
            "--bow-wave",
            "--gains",
            "table2",
            "--seed",
            "9",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["nominal-9.csv", "nominal-9.outcome.txt"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("IBVS_DOCK_OUT", dir.path())
        .args(["run", "--seed", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("nominal-2.csv").exists());
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "name = \"bad\"\ncapture_radius = -1.0\n").unwrap();
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("capture_radius"), "{}", stderr(&o));

    fs::write(&cfg, "[gains]\ntable = \"table9\"\n").unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gains.table"), "{}", stderr(&o));

    fs::write(&cfg, "capture_radus = 0.2\n").unwrap();
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("capture_radus"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_an_error() {
    let o = run(&["validate", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/scenario.toml"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["run", "--controller", "mpc"]).status.code(), Some(1));
    assert_eq!(run(&["run", "--pose-error", "1,2"]).status.code(), Some(1));
    assert_eq!(run(&["launch"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn synth_reports_default_plant() {
    let o = run(&["synth"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("K_x1 (2x4)") && text.contains("K_e2 (2x1)"));
    assert_eq!(text.matches("closed-loop eigenvalues (6)").count(), 2);
}

#[test]
fn synth_double_integrator_matches_closed_form() {
    let cfg = configs().join("synth_double_integrator.toml");
    let o = run(&["synth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("1.732051e0"), "{text}");
    assert!(text.contains("1.414214e0"), "{text}");
}

#[test]
fn indefinite_input_weight_fails_synthesis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("indef.toml");
    fs::write(&cfg, "[weights]\nr_lat = [[1.0, 0.0], [0.0, -1.0]]\n").unwrap();
    let o = run(&["synth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("R_lat"), "{}", stderr(&o));
}

#[test]
fn validate_rejects_synthesis_only_plant() {
    let cfg = configs().join("synth_double_integrator.toml");
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("plant"));
}

#[test]
fn batch_writes_per_seed_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "batch",
        "--turbulence",
        "1",
        "--seed",
        "3",
        "--seeds",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for s in 3..6 {
        assert!(dir.path().join(format!("nominal-{s}.csv")).exists());
        assert!(dir.path().join(format!("nominal-{s}.outcome.txt")).exists());
    }
    let summary = fs::read_to_string(dir.path().join("nominal-batch.txt")).unwrap();
    assert!(summary.contains("runs: 3"));
    assert!(summary.contains("seeds: 3..6"));
}

#[test]
fn batch_with_failures_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "batch",
        "--controller",
        "pbvs",
        "--pose-error",
        "1,0,-0.5",
        "--seeds",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
