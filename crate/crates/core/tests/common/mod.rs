#![allow(dead_code)]

use std::path::Path;

use helix_kz::harness::{EnsembleSection, ExperimentConfig, ScheduleTemplate, TrajectoryMode};
use helix_kz::SimParams;

/// Small crystalline ring with a short protocol; a few milliseconds per
/// trajectory.
pub fn tiny_chain(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        sim: SimParams { n_ions: 8, eta: 4.38, kt: 0.0035, dt: 0.02, seed: 99 },
        schedule: ScheduleTemplate { nu_start: 2.54, nu_end: 1.68, t_thermalize: 5.0, t_relax: 10.0 },
        experiment: EnsembleSection {
            tau_q: vec![5.0, 10.0, 20.0],
            runs_per_rate: 6,
            snapshots_per_trajectory: 20,
            output_dir: dir.to_path_buf(),
            workers: 1,
            trace_cells: vec![(1, 2)],
            full_trace_stride: None,
            fit_max_ln_rate: 0.0,
            fit_min_ln_rate: None,
            mode: TrajectoryMode::Physics,
        },
    }
}

pub fn synthetic(dir: &Path, runs: usize) -> ExperimentConfig {
    let mut cfg = tiny_chain(dir);
    cfg.experiment.tau_q = vec![1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8];
    cfg.experiment.runs_per_rate = runs;
    cfg.experiment.trace_cells.clear();
    cfg.experiment.mode = TrajectoryMode::Synthetic { sigma_ref: 20.0 };
    cfg
}

/// Final windings of every finished cell, keyed by cell.
pub fn winding_table(cfg: &ExperimentConfig) -> Vec<(usize, usize, u64, i64)> {
    let rec: helix_kz::harness::RunRecord = serde_json::from_slice(
        &std::fs::read(cfg.experiment.output_dir.join("run_record.json")).unwrap(),
    )
    .unwrap();
    let mut t: Vec<_> = rec
        .trajectories
        .iter()
        .map(|r| (r.rate_index, r.run_index, r.seed, r.final_winding))
        .collect();
    t.sort();
    t
}
