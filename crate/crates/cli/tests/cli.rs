use std::path::Path;
use std::process::{Command, Output};

fn eventoptics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventoptics"))
        .args(args)
        .env_remove("EVENTOPTICS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = eventoptics(&[flag]);
        assert_eq!(out.status.code(), Some(0), "{flag}");
    }
    assert!(String::from_utf8_lossy(&eventoptics(&["--help"]).stdout).contains("biprism"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["double-slit", "--events", "many"],
        &["biprism", "--screen-offset", "7furlongs"],
        &["two-beam", "--gamma", "1.5"],
        &["run", "--config", "/definitely/not/here.toml"],
    ] {
        assert_eq!(eventoptics(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn double_slit_writes_profile_report_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = eventoptics(&["--out", out, "-q", "double-slit", "--events", "200000", "--seed", "4"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("normalized rmse"), "{stdout}");

    let csv = read(&dir.path().join("double-slit.csv"));
    assert!(csv.starts_with("index,coordinate,received,fired,theory,theory_fitted\n"));
    assert_eq!(csv.lines().count(), 182);
    assert!(read(&dir.path().join("double-slit.fit.txt")).contains("normalized_rmse="));
    let config = read(&dir.path().join("double-slit.toml"));
    assert!(config.contains("seed = 4"));
    assert!(config.contains("events = 200000"));
}

#[test]
fn biprism_offset_list_writes_one_profile_each() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = eventoptics(&[
        "--out",
        out,
        "-q",
        "biprism",
        "--screen-offset",
        "7mm,1.5cm",
        "--events",
        "30000",
        "--detectors",
        "100",
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for name in ["biprism-7mm", "biprism-15mm"] {
        let csv = read(&dir.path().join(format!("{name}.csv")));
        assert_eq!(csv.lines().count(), 101, "{name}");
    }
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_eventoptics"))
        .args(["-q", "two-beam", "--events", "20000"])
        .env("EVENTOPTICS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.path().join("two-beam.csv").exists());
}

#[test]
fn config_file_reproduces_a_preset_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mine.toml");
    let printed = eventoptics(&["config", "two-beam", "--events", "50000", "--seed", "7"]);
    assert_eq!(printed.status.code(), Some(0));
    std::fs::write(&path, &printed.stdout).unwrap();

    let out = dir.path().to_str().unwrap();
    let a = eventoptics(&["--out", out, "-q", "run", "--config", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = eventoptics(&["--out", out, "-q", "two-beam", "--events", "50000", "--seed", "7"]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(
        read(&dir.path().join("mine.csv")),
        read(&dir.path().join("two-beam.csv"))
    );
}

#[test]
fn malformed_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "experiment = \"double-slit\"\nsigma = \"1um\"\n").unwrap();
    let run = eventoptics(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("sigma"));
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let run = eventoptics(&["--out", out.to_str().unwrap(), "-q", "two-beam", "--events", "20000"]);
    assert_eq!(run.status.code(), Some(2));
}
