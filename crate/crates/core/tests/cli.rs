mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{synthetic, tiny_chain};

fn helixkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helixkz"))
        .args(args)
        .env_remove(helix_kz::harness::WORKERS_ENV)
        .output()
        .unwrap()
}

fn write_config(path: &Path, text: &str) -> String {
    fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn predict_kzm_prints_the_estimate() {
    let out = helixkz(&["predict-kzm", "--n", "400", "--eta", "4.38", "--delta0", "4.3688", "--tauq", "1000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("mean_abs_W")).unwrap();
    let w: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    let expected = (400.0 / (6.0 * std::f64::consts::PI)).sqrt() * (4.38 * 4.3688 / 1000.0_f64).powf(0.125);
    assert!((w - expected).abs() < 1e-5);
}

#[test]
fn non_positive_prediction_input_is_a_config_error() {
    let out = helixkz(&["predict-kzm", "--n", "400", "--eta", "0", "--delta0", "4.3688", "--tauq", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_chain(&dir.path().join("out"));
    let text = cfg.to_toml_string().unwrap().replace("[sim]", "[sim]\nmass = 1.0");
    let path = write_config(&dir.path().join("bad.toml"), &text);
    let out = helixkz(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("mass"));
}

#[test]
fn run_resume_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = synthetic(&out_dir, 50);
    let path = write_config(&dir.path().join("syn.toml"), &cfg.to_toml_string().unwrap());

    let run = helixkz(&["run", "--config", &path]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = fs::read(out_dir.join("results.csv")).unwrap();
    assert!(String::from_utf8_lossy(&table)
        .starts_with("tau_Q,ln_inv_rate,n_runs,mean_abs_W,sigma_W,skewness,kzm_prediction,ratio_kzm_to_observed"));

    fs::remove_file(out_dir.join("cells/r003_k000010.json")).unwrap();
    let out_str = out_dir.to_str().unwrap();
    let resume = helixkz(&["resume", "--dir", out_str]);
    assert!(resume.status.success());
    assert_eq!(table, fs::read(out_dir.join("results.csv")).unwrap());

    let analyze = helixkz(&["analyze", "--dir", out_str, "--window-max", "-12"]);
    assert!(analyze.status.success());
    let text = String::from_utf8(analyze.stdout).unwrap();
    assert!(text.contains("3 points"), "{text}");
}

#[test]
fn resume_of_a_missing_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = helixkz(&["resume", "--dir", dir.path().join("nothing").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn failure_threshold_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny_chain(&dir.path().join("out"));
    cfg.sim.n_ions = 16;
    cfg.sim.kt = 20.0;
    cfg.experiment.trace_cells.clear();
    let path = write_config(&dir.path().join("hot.toml"), &cfg.to_toml_string().unwrap());
    let out = helixkz(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gl_run_writes_grid_traces() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
seed = 3

[gl]
h = 1.0
g = 17.6
eta = 4.38
noise_kt = 1.0e-3
grid_points = 64
domain_length = 64.0
dt = 0.05

[schedule]
nu_start = 2.54
nu_end = 1.68
t_thermalize = 5.0
t_relax = 20.0

[experiment]
tau_q = [16.0, 64.0]
runs_per_rate = 3
snapshots_per_trajectory = 10
output_dir = "{}"
trace_cells = [[0, 1]]
"#,
        dir.path().join("out").display()
    );
    let path = write_config(&dir.path().join("gl.toml"), &text);
    let out = helixkz(&["gl-run", "--config", &path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("out/traces/r000_k000001.csv")).unwrap();
    assert!(trace.starts_with("time,grid_index,x,absA,theta,W\n"));
    let rows = helix_kz::harness::read_results_csv(&dir.path().join("out/results.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].n_runs, 3);
}
