use std::path::Path;
use std::process::{Command, Output};

fn jamlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jamlab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("JAMLAB_OUT_DIR")
        .output()
        .unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

const SER: &str = r#"
kind = "ser_vs_rho"
seed = 9
trials = 400
[channel]
snr_db = -8.0
[jammer]
type = "band"
sjr_db = 0.0
[sweep]
axis = "rho"
values = [0.2, 0.6]
"#;

#[test]
fn spectrum_peak_reads_144() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        jamlab(&["spectrum", "--u0", "20", "--sigma-j-sq", "2", "--a", "67", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("res/dft_illustration.csv"));
    assert_eq!(rows[0], ["n", "magnitude", "interference_re", "interference_im", "interference_mag"]);
    let mags: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    let peak = mags.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(peak.0, 67);
    assert_eq!(peak.1.round(), 144.0);
    assert!(dir.path().join("res/dft_illustration.manifest.json").exists());
}

#[test]
fn ser_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("rho.toml"), SER).unwrap();
    let out = jamlab(&["ser", "--config", "rho.toml", "--seed", "42", "--out", "results"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("results/ser_vs_rho.csv"));
    assert_eq!(&rows[0][..4], ["x", "metric", "ci_halfwidth", "trials_effective"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][3], "400");

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("results/ser_vs_rho.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["trials_per_point"], serde_json::json!([400, 400]));
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));

    // The recorded document reproduces the table byte for byte.
    std::fs::write(dir.path().join("again.toml"), manifest["config"].as_str().unwrap()).unwrap();
    let out = jamlab(&["ser", "--config", "again.toml", "--out", "again"], dir.path());
    assert!(out.status.success());
    let a = std::fs::read(dir.path().join("results/ser_vs_rho.csv")).unwrap();
    let b = std::fs::read(dir.path().join("again/ser_vs_rho.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fast_scales_trials() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("rho.toml"), SER).unwrap();
    let out = jamlab(&["ser", "--config", "rho.toml", "--fast", "4", "--out", "."], dir.path());
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("ser_vs_rho.csv"));
    assert_eq!(rows[1][3], "100");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("rho.toml"), SER).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jamlab"))
        .args(["ser", "--config", "rho.toml"])
        .current_dir(dir.path())
        .env("JAMLAB_OUT_DIR", "from_env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from_env/ser_vs_rho.csv").exists());
}

#[test]
fn validate_names_the_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), SER.replace("0.6]", "1.5]")).unwrap();
    let out = jamlab(&["validate", "--config", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho"));

    std::fs::write(dir.path().join("typo.cfg"), SER.replace("trials", "trails")).unwrap();
    let out = jamlab(&["validate", "--config", "typo.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails"));

    std::fs::write(dir.path().join("good.cfg"), SER).unwrap();
    assert!(jamlab(&["validate", "--config", "good.cfg"], dir.path()).status.success());
}

#[test]
fn argument_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jamlab(&["ser", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(jamlab(&["validate", "--config", "missing.toml"], dir.path()).status.code(), Some(1));
    // A subcommand that does not run this kind.
    std::fs::write(dir.path().join("rho.toml"), SER).unwrap();
    assert_eq!(jamlab(&["pmd", "--config", "rho.toml"], dir.path()).status.code(), Some(1));
    // Output directory blocked by a regular file.
    std::fs::write(dir.path().join("blocked"), "").unwrap();
    let out = jamlab(&["ser", "--config", "rho.toml", "--out", "blocked"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detect_demo_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamlab(&["detect-demo", "--trials", "3", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("detect_demo.csv"));
    // Header plus three trials for each of the four hypotheses.
    assert_eq!(rows.len(), 13);
    let again = tempfile::tempdir().unwrap();
    jamlab(&["detect-demo", "--trials", "3", "--out", "."], again.path());
    assert_eq!(rows, csv_rows(&again.path().join("detect_demo.csv")));
}
