//! The `alehdg` binary: exit codes, error records, config files and outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alehdg"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("alehdg-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn error_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().last().expect("an error record");
    serde_json::from_str(line).unwrap()
}

#[test]
fn small_accuracy_run_writes_table_and_csv() {
    let dir = scratch("acc");
    let out = bin()
        .args(["accuracy", "--resolutions", "4,8", "--viscosities", "1", "-o"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.join("convergence.txt")).unwrap();
    assert!(table.contains("velocity, k=2"));
    let csv = std::fs::read_to_string(dir.join("errors.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let run = |name: &str| {
        let dir = scratch(name);
        let out = bin()
            .args(["accuracy", "--resolutions", "4", "--viscosities", "1e-6", "-o"])
            .arg(&dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(dir.join("errors.csv")).unwrap()
    };
    assert_eq!(run("det1"), run("det2"));
}

#[test]
fn bad_parameter_gives_json_record_and_nonzero_exit() {
    let out = bin().args(["bubble", "--bubble-case", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["status"], "error");
    assert_eq!(rec["kind"], "parameter");
    assert_eq!(rec["case"], "bubble");

    let out = bin().args(["solitary", "--tau", "1"]).output().unwrap();
    assert_eq!(error_record(&out)["kind"], "parameter");

    let out = bin().args(["accuracy", "--k", "two"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["kind"], "parse");
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("cfg");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# short coarse bubble\ncase = bubble\nh = 0.1\nt_end = 1.0  # overridden\ncadence = 2\n").unwrap();
    let out = bin()
        .args(["bubble", "--config"])
        .arg(&cfg)
        .args(["-T", "0.05", "-o"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let series = std::fs::read_to_string(dir.join("series.csv")).unwrap();
    // header, t = 0 and four steps of h/8
    assert_eq!(series.lines().count(), 6);
    assert!(dir.join("bubble_000002.vtk").exists() && dir.join("interface_000004.dat").exists());
    assert!(dir.join("interface_final.dat").exists() && dir.join("steps.csv").exists());

    // a config written for another case is refused
    let out = bin().args(["solitary", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_parse_error() {
    let dir = scratch("unknown");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "k = 2\nmesh_resolution = 3\n").unwrap();
    let out = bin().args(["accuracy", "--config"]).arg(&cfg).output().unwrap();
    let rec = error_record(&out);
    assert_eq!(rec["kind"], "parse");
    assert!(rec["message"].as_str().unwrap().contains("line 2"));
}
