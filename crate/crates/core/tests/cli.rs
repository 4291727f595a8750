use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn susco(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susco"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SUSCO_OUT_DIR")
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").canonicalize().unwrap()
}

/// A short telesat scenario written into `dir`, pointing at the shipped catalog.
fn short_config(dir: &Path, intervals: u32) -> PathBuf {
    let text = std::fs::read_to_string(configs().join("telesat.toml"))
        .unwrap()
        .replace("num_intervals = 100", &format!("num_intervals = {intervals}"))
        .replace(
            "dish_catalog = \"dishes.csv\"",
            &format!("dish_catalog = {:?}", configs().join("dishes.csv").display().to_string()),
        );
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path(), 3);
    let out = tmp.path().join("out");
    let o = susco(&["run", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "--scheme", "falcon"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["metrics.csv", "transcript.csv", "summary.txt", "config.toml"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 4);
    assert!(std::fs::read_to_string(out.join("config.toml")).unwrap().contains("falcon"));
}

#[test]
fn missing_catalog_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "dish_catalog = \"nowhere.csv\"\n").unwrap();
    let o = susco(&["run", cfg.to_str().unwrap(), "--out-dir", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nowhere.csv"), "{}", stderr(&o));
    assert!(!tmp.path().join("o").join("metrics.csv").exists());
}

#[test]
fn unknown_config_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "seeds = 3\n").unwrap();
    let o = susco(&["validate-config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_one_directory_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path(), 2);
    let out = tmp.path().join("sweep");
    let o = susco(
        &[
            "sweep",
            cfg.to_str().unwrap(),
            "--param",
            "scheme",
            "--values",
            "susco,service,falcon",
            "--seeds",
            "1,2",
            "--out-dir",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for v in ["susco", "service", "falcon"] {
        for s in [1, 2] {
            assert!(out.join(format!("scheme={v}/seed={s}/metrics.csv")).is_file());
        }
    }
    let joined = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(joined.lines().count(), 1 + 6);
}

#[test]
fn sweep_rejects_bad_arguments() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path(), 1);
    let c = cfg.to_str().unwrap();
    let empty = susco(&["sweep", c, "--param", "budget", "--values", "", "--out-dir", "o"], tmp.path());
    assert_eq!(empty.status.code(), Some(1));
    let unknown = susco(&["sweep", c, "--param", "altitude", "--values", "1", "--out-dir", "o"], tmp.path());
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr(&unknown).contains("altitude"));
}

#[test]
fn small_audit_passes_the_safety_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = susco(
        &["audit", "--instances", "1", "--checks", "individual-rationality,budget,constraints", "--out-dir", "o"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS individual-rationality"));
}

#[test]
fn underpayment_fails_the_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("audit");
    let o = susco(
        &[
            "audit",
            "--instances",
            "50",
            "--checks",
            "individual-rationality,constraints",
            "--underpay",
            "0.001",
            "--out-dir",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.contains("FAIL individual-rationality"), "{text}");
    assert!(text.contains("(27)"), "{text}");
    assert!(out.join("audit-failure-individual-rationality.json").is_file());
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(susco(&["frobnicate"], tmp.path()).status.code(), Some(1));
    let o = susco(&["presets"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2xstarlink"));
}
