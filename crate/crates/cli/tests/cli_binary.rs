//! The `lgae` binary: run/check subcommands, output formats, exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lgae-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str) -> PathBuf {
    let path = scratch(name);
    fs::write(
        &path,
        "task = link-prediction\n\
         dataset = sbm-fixture\n\
         format = sbm\n\
         sbm_blocks = 25,25\n\
         sbm_p_in = 0.4\n\
         sbm_p_out = 0.03\n\
         sbm_seed = 5\n\
         encoder = linear\n\
         embedding_dim = 8\n\
         epochs = 60\n\
         repetitions = 2\n\
         master_seed = 3\n",
    )
    .unwrap();
    path
}

fn lgae() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lgae"))
}

#[test]
fn run_writes_a_parseable_json_report() {
    let config = write_config("run.cfg");
    let out = scratch("report.json");
    let status = lgae()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report = lgae_cli::report::load_report(&out).unwrap();
    assert_eq!(report.config.repetitions, 2);
    assert_eq!(report.repetitions.len(), 2);
    assert!(report.summary("auc").is_some());
}

#[test]
fn run_honors_format_and_overrides() {
    let config = write_config("fmt.cfg");
    let output = lgae()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--format", "csv", "--repetitions", "3"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    // header + 3 repetitions + mean + std
    assert_eq!(text.lines().count(), 6, "{text}");

    let table = lgae()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--format", "table"])
        .output()
        .unwrap();
    let table = String::from_utf8(table.stdout).unwrap();
    assert!(table.contains("AUC (in %)"));
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let config = write_config("check.cfg");
    let out = scratch("check_report.json");
    assert!(lgae()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let report = lgae_cli::report::load_report(&out).unwrap();
    let auc = report.summary("auc").unwrap().mean;

    let good_ref = scratch("good.ref");
    fs::write(&good_ref, format!("linear_ae.auc {auc:.2} 5.0\n")).unwrap();
    let output = lgae()
        .args(["check", "--report"])
        .arg(&out)
        .args(["--reference"])
        .arg(&good_ref)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout).unwrap().contains("PASS"));

    let bad_ref = scratch("bad.ref");
    fs::write(&bad_ref, "linear_ae.auc 5.0 0.1\n").unwrap();
    let output = lgae()
        .args(["check", "--report"])
        .arg(&out)
        .args(["--reference"])
        .arg(&bad_ref)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8(output.stdout).unwrap().contains("FAIL"));
}

#[test]
fn run_fails_cleanly_on_missing_config() {
    let output = lgae()
        .args(["run", "--config", "/nonexistent/path.cfg"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8(output.stderr).unwrap().contains("error"));
}
