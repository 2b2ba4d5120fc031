use std::path::Path;
use std::process::Command;

use star_ris::Access;
use star_ris_sim::experiment::{CellSummary, ResultRow};
use star_ris_sim::output::{emit_csv, emit_plotdata, read_csv, RESULTS_HEADER};
use star_ris_sim::SchemeKind;

fn starsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_starsim"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"
realizations = 2
n_values = [4]
schemes = ["coupled-noma", "independent-noma", "conventional-oma"]

[[profiles]]
name = "symmetric"
rate_t = 2.0
rate_r = 2.0
"#;

fn row(power_w: f64) -> ResultRow {
    ResultRow {
        scheme: SchemeKind::Coupled,
        access: Access::Noma,
        n_elements: 4,
        profile: "symmetric".into(),
        realization: 0,
        seed: 42,
        power_w,
        power_dbm: star_ris::link::watts_to_dbm(power_w),
        order: "T_STRONG".into(),
        iterations: 3,
        converged: true,
    }
}

#[test]
fn run_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let status = starsim()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,access,n_elements,profile,realization,seed,power_w,power_dbm,order,iterations,converged"
    );
    assert_eq!(lines.count(), 6);
    let plot = std::fs::read_to_string(out.join("plotdata.csv")).unwrap();
    assert_eq!(plot.lines().count(), 4);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["rng"].as_str().unwrap().contains("ChaCha20"));
    assert_eq!(manifest["config"]["realizations"], 2);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn run_rejects_bad_config_with_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_values = [5]");
    let out = starsim()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_values[0]"), "{err}");
}

#[test]
fn single_dumps_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = starsim()
        .args(["single", "--config"])
        .arg(&cfg)
        .args(["--seed", "7", "--dump-coefficients"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("scheme,power_w,power_dbm,order,iterations,converged\n"));
    assert!(text.contains("scheme,element,beta_t,beta_r,theta_t,theta_r"));
    // 3 schemes x 4 elements of coefficients.
    assert_eq!(
        text.lines()
            .filter(|l| l.contains("-noma,") || l.contains("-oma,"))
            .count(),
        3 + 12
    );
}

#[test]
fn verify_quick_passes_and_fault_fails() {
    let ok = starsim().args(["verify", "--quick"]).output().unwrap();
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(ok.status.success(), "{text}");
    assert!(text.contains("PASS oracle-ratio-n1"));

    let bad = starsim()
        .args(["verify", "--quick", "--inject-coupling-fault", "3"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("FAIL ao-passive-lossless"));
    assert!(text.contains("element 3: phase-coupling"));
}

#[test]
fn csv_single_row_and_milliwatt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    emit_csv(&[row(1e-3)], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], RESULTS_HEADER.join(","));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[7], "0");
    assert!(!fields[6].contains('e'));
    assert!(emit_csv(&[], &path).is_err());
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let rows: Vec<ResultRow> = [3.3e-2, 1.0 / 3.0, 7.123456789012345e-9, 12.5]
        .iter()
        .enumerate()
        .map(|(i, &w)| ResultRow {
            realization: i,
            seed: u64::MAX - i as u64,
            access: if i % 2 == 0 { Access::Noma } else { Access::Oma },
            ..row(w)
        })
        .collect();
    emit_csv(&rows, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), rows);
}

#[test]
fn csv_io_error_names_path() {
    let err = emit_csv(&[row(1.0)], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
    assert!(format!("{err:#}").contains("/nonexistent-dir/x.csv"));
}

#[test]
fn plotdata_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let cell = |n| CellSummary {
        profile: "symmetric".into(),
        access: Access::Noma,
        scheme: SchemeKind::Coupled,
        n_elements: n,
        mean_dbm: 10.0,
        stderr_dbm: 0.0,
        count: 1,
        excluded: 0,
    };
    emit_plotdata(&[cell(10), cell(20)], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("profile,access,scheme,n_elements,mean_dbm,stderr_dbm"));
}
