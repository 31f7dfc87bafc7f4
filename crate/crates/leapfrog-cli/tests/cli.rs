use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn leapfrog(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leapfrog"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .env_remove("LEAPFROG_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_paths(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout).lines().map(str::to_owned).collect()
}

#[test]
fn out_of_range_epsilon_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = leapfrog(&["kernel-check", "--epsilon", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("dup.cfg", "kappa = 0.4\nkappa = 0.5\n"),
        ("unknown.cfg", "kapa = 0.4\n"),
        ("syntax.cfg", "kappa 0.4\n"),
    ] {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        let o = leapfrog(&["kernel-check", "--config", p.to_str().unwrap()], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}");
    }
}

#[test]
fn bad_thread_cap_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_leapfrog"))
        .args(["kernel-check", "--output-dir"])
        .arg(dir.path())
        .env("LEAPFROG_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kernel_check_lists_its_files_and_clears_a_stale_report() {
    let dir = tempfile::tempdir().unwrap();
    let stale = dir.path().join("failures.jsonl");
    fs::write(&stale, "{}\n").unwrap();
    let o = leapfrog(&["kernel-check"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let paths = stdout_paths(&o);
    assert!(!paths.is_empty());
    for p in &paths {
        assert!(Path::new(p).is_file(), "{p}");
    }
    assert!(paths.iter().any(|p| p.ends_with("kernel_checks.csv")));
    assert!(!stale.exists());
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small grid\nlambda_points = 3\nkappa_points = 5\n").unwrap();
    let o = leapfrog(
        &[
            "period",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "kappa_points=2",
            "--no-svg",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let table = fs::read_to_string(dir.path().join("period_table.csv")).unwrap();
    // header plus 3 × 2 cells
    assert_eq!(table.lines().count(), 7);
    assert!(table.starts_with("lambda,kappa,t0,t_measured,rel_err,lower,upper,dt0_dlambda"));
}

#[test]
fn outputs_are_reproducible_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "period",
        "--set",
        "lambda_points=2",
        "--set",
        "kappa_points=3",
        "--no-svg",
    ];
    let o = leapfrog(&args, a.path());
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_leapfrog"))
        .args(args)
        .arg("--output-dir")
        .arg(b.path())
        .env("LEAPFROG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("period_table.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn seeded_spectral_check_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = leapfrog(&["spectral-check", "--seed", "7"], d.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &Path| fs::read(d.join("spectral_checks.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn failed_checks_exit_one_with_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    // far too loose for the invariant checks
    let o = leapfrog(&["filaments", "--tol", "1e-5", "--no-svg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let report = dir.path().join("failures.jsonl");
    assert!(stdout_paths(&o).iter().any(|p| p.ends_with("failures.jsonl")));
    let text = fs::read_to_string(report).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["scenario"], "filaments");
        assert_eq!(v["kind"], "check");
        assert!(v["value"].as_f64().unwrap() > v["threshold"].as_f64().unwrap());
    }
    assert!(dir.path().join("trajectory.csv").is_file());
}
