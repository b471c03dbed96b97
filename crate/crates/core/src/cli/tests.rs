use super::*;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

static NEXT: AtomicUsize = AtomicUsize::new(0);

/// Fresh directory holding `config.json`.
fn workspace(config: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "kerrcqa-cli-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("config.json"), config).unwrap();
    dir
}

fn invoke(cmd: &str, dir: &Path, extra: &[&str]) -> i32 {
    let cfg = dir.join("config.json");
    let out = dir.join("out");
    let mut args = vec!["kerrcqa".to_string(), cmd.into(), "--config".into(), cfg.display().to_string()];
    args.extend(["--out".to_string(), out.display().to_string()]);
    args.extend(extra.iter().map(|s| s.to_string()));
    run(args)
}

fn read_json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

/// Data lines of a CSV file (comments skipped), split into cells.
fn read_csv(dir: &Path, name: &str) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join("out").join(name))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn vacuum_solve_has_no_photons() {
    let dir = workspace(r#"{"params": {"K": 1.0, "kappa1": 0.5}}"#);
    assert_eq!(invoke("solve", &dir, &[]), 0);
    let state = read_json(&dir, "state.json");
    assert_eq!(state["mean_n"], 0.0);
    assert_eq!(state["fock_probs"][0], 1.0);
    assert_eq!(state["config"]["command"], "solve");
    let text = fs::read_to_string(dir.join("out/rho.csv")).unwrap();
    assert!(text.starts_with("# config: {"));
}

#[test]
fn degenerate_kerr_exits_with_validation_code() {
    let dir = workspace(r#"{"params": {"K": 0.0, "Lambda1": [0.3, 0.0], "kappa1": 0.5}}"#);
    assert_eq!(invoke("solve", &dir, &[]), 2);
    let e: CliError = KerrError::DegenerateKerr.into();
    assert_eq!(e.exit_code, 2);
    let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
    assert_eq!(v["error"], "DegenerateKerr");
}

#[test]
fn finite_kernel_density_matrix() {
    // K = κ2 = 0, Λ3 = κ1/2, Λ1 = −Λ3: the state lives on |0⟩, |1⟩.
    let dir = workspace(r#"{"params": {"K": 0.0, "Lambda3": [0.5, 0.0], "Lambda1": [-0.5, 0.0], "kappa1": 1.0}}"#);
    assert_eq!(invoke("solve", &dir, &["--cutoff", "3", "--oracle"]), 0);
    let rows = read_csv(&dir, "rho.csv");
    assert_eq!(rows[0][..5], ["m", "0_re", "0_im", "1_re", "1_im"]);
    let cell = |m: usize, k: usize| rows[m + 1][k].parse::<f64>().unwrap();
    assert!((cell(0, 1) - 2.0 / 3.0).abs() < 1e-12);
    assert!((cell(1, 3) - 1.0 / 3.0).abs() < 1e-12);
    assert!(cell(0, 4).abs() > 0.3 && (cell(0, 4).abs() - 1.0 / 3.0).abs() < 1e-12);
    assert!((cell(0, 4) + cell(1, 2)).abs() < 1e-12, "hermitian");
    let state = read_json(&dir, "state.json");
    assert!(state["derived"].is_null());
    assert!(state["oracle"]["hs_distance"].as_f64().unwrap() < 1e-9);
}

#[test]
fn vacuum_wigner_centre() {
    let dir = workspace(
        r#"{"params": {"K": 1.0, "kappa1": 1.0},
            "grid": {"x_min": -3, "x_max": 3, "y_min": -3, "y_max": 3, "nx": 101, "ny": 101}}"#,
    );
    let centre = |text: &str| {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .find(|v| v[0].abs() < 1e-12 && v[1].abs() < 1e-12)
            .unwrap()[2]
    };
    let two_over_pi = 2.0 / std::f64::consts::PI;
    assert_eq!(invoke("wigner", &dir, &[]), 0);
    let text = fs::read_to_string(dir.join("out/wigner.dat")).unwrap();
    assert!(text.contains("# path: closed-form"));
    assert!((centre(&text) - two_over_pi).abs() < 1e-14);
    // The numeric path agrees at the centre.
    assert_eq!(invoke("wigner", &dir, &["--oracle", "--cutoff", "10"]), 0);
    let text = fs::read_to_string(dir.join("out/wigner.dat")).unwrap();
    assert!(text.contains("# path: numeric"));
    assert!((centre(&text) - two_over_pi).abs() < 1e-10);
}

#[test]
fn wigner_header_records_q() {
    let dir = workspace(
        r#"{"params": {"K": 1.0, "Lambda1": [0.01, 0.0], "Lambda2": [4.0, 0.0], "kappa1": 0.01},
            "grid": {"x_min": -3, "x_max": 3, "y_min": -3, "y_max": 3, "nx": 5, "ny": 5}}"#,
    );
    assert_eq!(invoke("wigner", &dir, &[]), 0);
    let text = fs::read_to_string(dir.join("out/wigner.dat")).unwrap();
    let q = text.lines().find_map(|l| l.strip_prefix("# Q: ")).unwrap();
    let re: f64 = q.split_whitespace().next().unwrap().parse().unwrap();
    assert!((re - 1.0).abs() < 1e-12, "{q}");
}

#[test]
fn malformed_grid_is_rejected() {
    let bad_bounds = workspace(
        r#"{"params": {"K": 1.0}, "grid": {"x_min": 3, "x_max": -3, "y_min": -3, "y_max": 3, "nx": 11, "ny": 11}}"#,
    );
    assert_eq!(invoke("wigner", &bad_bounds, &[]), 2);
    let missing = workspace(r#"{"params": {"K": 1.0}, "grid": {"x_min": -3, "x_max": 3}}"#);
    assert_eq!(invoke("wigner", &missing, &[]), 2);
    assert!(!missing.join("out").exists(), "nothing is written before validation");
}

#[test]
fn unknown_and_foreign_keys_are_rejected() {
    let typo = workspace(r#"{"params": {"K": 1.0, "kapa1": 0.1}}"#);
    assert_eq!(invoke("derive", &typo, &[]), 2);
    let foreign = workspace(r#"{"params": {"K": 1.0}, "points": 3}"#);
    assert_eq!(invoke("solve", &foreign, &[]), 2);
    let mismatch = workspace(r#"{"params": {"K": 1.0}, "command": "scan"}"#);
    assert_eq!(invoke("derive", &mismatch, &[]), 2);
    let ok = workspace(r#"{"params": {"K": 1.0}, "command": "derive"}"#);
    assert_eq!(invoke("derive", &ok, &[]), 0);
    assert_eq!(invoke("derive", &ok, &["--tol", "-1"]), 2);
    assert_eq!(invoke("derive", &ok, &["--bogus"]), 2);
}

#[test]
fn single_point_scan() {
    let dir = workspace(
        r#"{"params": {"K": 1.0, "Lambda2": [0.5, 0.0], "kappa1": 0.3},
            "axis": {"parameter": "Lambda1", "start": [0.4, -0.2], "end": [1.0, 0.0]},
            "points": 1, "scan": {"fock_levels": 2}}"#,
    );
    assert_eq!(invoke("scan", &dir, &[]), 0);
    let rows = read_csv(&dir, "scan.csv");
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(&"p1".to_string()));
    let summary = read_json(&dir, "summary.json");
    assert_eq!(summary["rows"], 1);
    assert_eq!(summary["failures"], 0);
}

#[test]
fn scan_with_no_successful_rows_fails() {
    let dir = workspace(
        r#"{"params": {"K": 1.0, "Lambda1": [0.3, 0.0]},
            "axis": {"parameter": "kappa1", "start": -0.3, "end": -0.1}, "points": 3}"#,
    );
    assert_eq!(invoke("scan", &dir, &[]), 3);
    assert_eq!(read_json(&dir, "summary.json")["failures"], 3);
    assert_eq!(read_csv(&dir, "scan.csv").len(), 4);
}

#[test]
fn linear_cavity_spectrum() {
    let dir = workspace(r#"{"params": {"K": 0.0, "Lambda1": [0.2, 0.0], "kappa1": 0.4}, "eigenvalues": 3}"#);
    assert_eq!(invoke("spectrum", &dir, &["--cutoff", "12"]), 0);
    let rows = read_csv(&dir, "spectrum.csv");
    assert_eq!(rows[0], ["index", "eigenvalue_re", "eigenvalue_im", "rate"]);
    let gamma1: f64 = rows[1][3].parse().unwrap();
    assert!((gamma1 - 0.2).abs() < 1e-10, "{gamma1}");
}

#[test]
fn batch_reports_write_rows() {
    let meta = workspace(
        r#"{"params": {"K": 1.0, "Lambda2": [4.0, 0.0]}, "n": 2, "kappa1_values": [0.1], "cutoff": 24, "eigenvalues": 3}"#,
    );
    assert_eq!(invoke("metastable", &meta, &[]), 0);
    assert_eq!(read_csv(&meta, "metastable.csv").len(), 2);

    let parity = workspace(r#"{"params": {"K": 1.0, "Lambda2": [2.0, 0.0], "kappa2": 1.0}, "detunings": [0.0, 1.0]}"#);
    assert_eq!(invoke("parity", &parity, &[]), 0);
    assert_eq!(read_json(&parity, "summary.json")["rows"], 2);

    let diagram = workspace(
        r#"{"params": {"K": 1.0, "Lambda2": [2.0, 0.0]},
            "phase_diagram": {"r1_min": 0, "r1_max": 2, "r2_min": 0, "r2_max": 2, "n_r1": 3, "n_r2": 3}}"#,
    );
    assert_eq!(invoke("phase-diagram", &diagram, &[]), 0);
    let cells = read_csv(&diagram, "phase_diagram.csv");
    assert_eq!(cells.len(), 10);
    // r1 varies fastest.
    assert_eq!(cells[2][0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(cells[2][1].parse::<f64>().unwrap(), 0.0);

    let wrong = workspace(r#"{"params": {"K": 1.0, "Lambda2": [2.0, 0.0], "kappa1": 0.1}, "detunings": [0.0]}"#);
    assert_eq!(invoke("parity", &wrong, &[]), 2);
}

#[test]
fn identical_configs_give_identical_files() {
    let cfg = r#"{"params": {"K": 1.0, "Delta": 0.5, "Lambda2": [1.0, 0.0], "kappa1": 0.2},
                  "axis": {"parameter": "Lambda1", "start": [0.0, 0.0], "end": [1.0, 1.0]}, "points": 7,
                  "scan": {"oracle": true, "oracle_every": 3}}"#;
    let (a, b) = (workspace(cfg), workspace(cfg));
    assert_eq!(invoke("scan", &a, &[]), 0);
    assert_eq!(invoke("scan", &b, &[]), 0);
    for name in ["scan.csv", "summary.json"] {
        assert_eq!(fs::read(a.join("out").join(name)).unwrap(), fs::read(b.join("out").join(name)).unwrap(), "{name}");
    }
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(["kerrcqa", "--help"]), 0);
    assert_eq!(run(["kerrcqa"]), 2);
    let dir = workspace("{}");
    assert_eq!(invoke("solve", &dir, &[]), 2);
    let missing = dir.join("absent.json");
    assert_eq!(run(["kerrcqa", "derive", "--config", missing.to_str().unwrap()]), 2);
}
