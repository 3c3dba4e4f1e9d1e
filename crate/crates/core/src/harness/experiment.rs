//! Ensemble execution, persistence, resume and re-analysis.
//!
//! Output directory layout:
//!
//! ```text
//! config.toml        the configuration the directory belongs to
//! manifest.json      experiment kind, config hash, code version
//! cells/             one JSON file per finished (rate, run) cell
//! traces/            sampled traces of the flagged cells
//! run_record.json    merged per-trajectory records plus metadata
//! results.csv        one row per rate
//! histograms.csv     winding histograms per rate
//! scaling.json       statistics and power-law fit
//! ```
//!
//! Cells are written by the worker that ran them; the merged files are
//! produced by a single pass after all workers finish. Seeds are derived from
//! `(global seed, rate index, run index)`, so which worker runs which cell, and
//! whether the run was interrupted and resumed, does not change any result.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ensemble_stats, fit_power_law, RateRecord, RateWindow, ScalingResult};
use crate::error::{Error, Result};
use crate::rng::trajectory_seed;

use super::config::{EnsembleSection, ExperimentConfig, GlExperimentConfig};
use super::io::{histograms_csv, read_json, results_csv, trace_csv, write_atomic, write_json, KzmInputs};
use super::trajectory::{run_gl_trajectory, run_trajectory, timed, TrajectoryOutcome};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest tolerated fraction of failed trajectories.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Chain,
    Field,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub rate_index: usize,
    pub run_index: usize,
    pub seed: u64,
    pub tau_q: f64,
    pub final_winding: i64,
    pub phase_slips: usize,
    pub settled: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRecord {
    pub rate_index: usize,
    pub run_index: usize,
    pub seed: u64,
    pub tau_q: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CellRecord {
    Done(TrajectoryRecord),
    Failed(FailedRecord),
}

impl CellRecord {
    fn key(&self) -> (usize, usize) {
        match self {
            CellRecord::Done(r) => (r.rate_index, r.run_index),
            CellRecord::Failed(f) => (f.rate_index, f.run_index),
        }
    }
}

/// Merged record of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub code_version: String,
    pub dt: f64,
    /// `|2 nu_start (nu_end - nu_start)|`, used for the scaling comparison.
    pub delta0: f64,
    /// `|2 nu_c (nu_end - nu_start)|`.
    pub delta0_at_critical: f64,
    pub periodicity: String,
    pub force_summation: String,
    pub trajectories: Vec<TrajectoryRecord>,
    pub failed: Vec<FailedRecord>,
}

impl RunRecord {
    pub fn unsettled(&self) -> usize {
        self.trajectories.iter().filter(|t| !t.settled).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    pub record: RunRecord,
    pub scaling: ScalingResult,
}

/// Common surface of chain and field experiments.
trait Ensemble: Sync {
    fn kind(&self) -> ExperimentKind;
    fn section(&self) -> &EnsembleSection;
    fn config_hash(&self) -> String;
    fn config_toml(&self) -> Result<String>;
    fn seed(&self) -> u64;
    fn dt(&self) -> f64;
    fn kzm(&self) -> KzmInputs;
    fn delta0_at_critical(&self) -> f64;
    fn run_cell(&self, rate: usize, run: usize) -> Result<TrajectoryOutcome>;
    fn index_label(&self) -> &'static str;
}

impl Ensemble for ExperimentConfig {
    fn kind(&self) -> ExperimentKind {
        ExperimentKind::Chain
    }
    fn section(&self) -> &EnsembleSection {
        &self.experiment
    }
    fn config_hash(&self) -> String {
        self.hash()
    }
    fn config_toml(&self) -> Result<String> {
        self.to_toml_string()
    }
    fn seed(&self) -> u64 {
        self.sim.seed
    }
    fn dt(&self) -> f64 {
        self.sim.dt
    }
    fn kzm(&self) -> KzmInputs {
        KzmInputs {
            chain_length: self.sim.n_ions as f64,
            eta: self.sim.eta,
            delta0: self.schedule_for(0).delta0(),
        }
    }
    fn delta0_at_critical(&self) -> f64 {
        self.schedule_for(0).delta0_at_critical()
    }
    fn run_cell(&self, rate: usize, run: usize) -> Result<TrajectoryOutcome> {
        run_trajectory(self, rate, run)
    }
    fn index_label(&self) -> &'static str {
        "ion_index"
    }
}

impl Ensemble for GlExperimentConfig {
    fn kind(&self) -> ExperimentKind {
        ExperimentKind::Field
    }
    fn section(&self) -> &EnsembleSection {
        &self.experiment
    }
    fn config_hash(&self) -> String {
        self.hash()
    }
    fn config_toml(&self) -> Result<String> {
        self.to_toml_string()
    }
    fn seed(&self) -> u64 {
        self.seed
    }
    fn dt(&self) -> f64 {
        self.gl.dt
    }
    fn kzm(&self) -> KzmInputs {
        KzmInputs {
            chain_length: self.gl.domain_length,
            eta: self.gl.eta,
            delta0: self.schedule.with_tau_q(1.0).delta0(),
        }
    }
    fn delta0_at_critical(&self) -> f64 {
        self.schedule.with_tau_q(1.0).delta0_at_critical()
    }
    fn run_cell(&self, rate: usize, run: usize) -> Result<TrajectoryOutcome> {
        run_gl_trajectory(self, rate, run)
    }
    fn index_label(&self) -> &'static str {
        "grid_index"
    }
}

fn cell_path(dir: &Path, rate: usize, run: usize) -> PathBuf {
    dir.join("cells").join(format!("r{rate:03}_k{run:06}.json"))
}

fn trace_path(dir: &Path, rate: usize, run: usize) -> PathBuf {
    dir.join("traces").join(format!("r{rate:03}_k{run:06}.csv"))
}

/// Creates the directory or checks that it belongs to the same configuration.
fn prepare_dir<E: Ensemble>(exp: &E, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("cells")).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join("manifest.json");
    let current = exp.config_hash();
    if manifest_path.exists() {
        let m: Manifest = read_json(&manifest_path)?;
        if m.config_hash != current || m.kind != exp.kind() {
            return Err(Error::ConfigMismatch {
                dir: dir.to_path_buf(),
                stored: m.config_hash,
                current,
            });
        }
    } else {
        write_atomic(&dir.join("config.toml"), exp.config_toml()?.as_bytes())?;
        write_json(
            &manifest_path,
            &Manifest {
                kind: exp.kind(),
                config_hash: current,
                code_version: CODE_VERSION.to_string(),
            },
        )?;
    }
    Ok(())
}

fn run_one<E: Ensemble>(exp: &E, dir: &Path, rate: usize, run: usize) -> Result<()> {
    let sec = exp.section();
    let seed = trajectory_seed(exp.seed(), rate, run);
    let tau_q = sec.tau_q[rate];
    let (outcome, wall) = timed(|| exp.run_cell(rate, run));
    let record = match outcome {
        Ok(out) => {
            if sec.trace_cells.contains(&(rate, run)) {
                let bytes = trace_csv(&out.trace.snapshots, exp.index_label())?;
                write_atomic(&trace_path(dir, rate, run), &bytes)?;
            }
            CellRecord::Done(TrajectoryRecord {
                rate_index: rate,
                run_index: run,
                seed,
                tau_q,
                final_winding: out.final_winding,
                phase_slips: out.phase_slips,
                settled: out.settled,
                wall_time_s: wall,
            })
        }
        Err(e) => {
            eprintln!("trajectory (rate {rate}, run {run}, seed {seed}) failed: {e}");
            CellRecord::Failed(FailedRecord {
                rate_index: rate,
                run_index: run,
                seed,
                tau_q,
                error: e.to_string(),
            })
        }
    };
    write_json(&cell_path(dir, rate, run), &record)
}

fn missing_cells<E: Ensemble>(exp: &E, dir: &Path) -> Vec<(usize, usize)> {
    let sec = exp.section();
    (0..sec.tau_q.len())
        .flat_map(|r| (0..sec.runs_per_rate).map(move |k| (r, k)))
        .filter(|&(r, k)| !cell_path(dir, r, k).exists())
        .collect()
}

fn load_cells<E: Ensemble>(exp: &E, dir: &Path) -> Result<Vec<CellRecord>> {
    let sec = exp.section();
    let mut cells = Vec::with_capacity(sec.n_cells());
    for r in 0..sec.tau_q.len() {
        for k in 0..sec.runs_per_rate {
            let p = cell_path(dir, r, k);
            if p.exists() {
                let c: CellRecord = read_json(&p)?;
                debug_assert_eq!(c.key(), (r, k));
                cells.push(c);
            }
        }
    }
    Ok(cells)
}

fn scaling_from(tau_q: &[f64], trajectories: &[TrajectoryRecord], window: RateWindow) -> Result<ScalingResult> {
    let mut records = Vec::new();
    for (r, &tq) in tau_q.iter().enumerate() {
        let ws: Vec<i64> = trajectories
            .iter()
            .filter(|t| t.rate_index == r)
            .map(|t| t.final_winding)
            .collect();
        if ws.is_empty() {
            continue;
        }
        records.push(RateRecord {
            tau_q: tq,
            stats: ensemble_stats(&ws)?,
        });
    }
    let fit = fit_power_law(&records, window).ok();
    Ok(ScalingResult { records, fit })
}

/// Merges the cell files and writes the summary outputs.
fn finalize<E: Ensemble>(exp: &E, dir: &Path, window: RateWindow) -> Result<ExperimentOutput> {
    let cells = load_cells(exp, dir)?;
    let mut trajectories = Vec::new();
    let mut failed = Vec::new();
    for c in cells {
        match c {
            CellRecord::Done(t) => trajectories.push(t),
            CellRecord::Failed(f) => failed.push(f),
        }
    }
    let sec = exp.section();
    let scaling = scaling_from(&sec.tau_q, &trajectories, window)?;
    let record = RunRecord {
        kind: exp.kind(),
        config_hash: exp.config_hash(),
        code_version: CODE_VERSION.to_string(),
        dt: exp.dt(),
        delta0: exp.kzm().delta0,
        delta0_at_critical: exp.delta0_at_critical(),
        periodicity: "minimal image along x".into(),
        force_summation: "direct pairwise, fixed (i < j) order, one thread per trajectory".into(),
        trajectories,
        failed,
    };
    write_json(&dir.join("run_record.json"), &record)?;
    write_json(&dir.join("scaling.json"), &scaling)?;
    write_atomic(&dir.join("results.csv"), &results_csv(&scaling, exp.kzm())?)?;
    write_atomic(&dir.join("histograms.csv"), &histograms_csv(&scaling)?)?;

    let total = record.trajectories.len() + record.failed.len();
    if record.failed.len() as f64 > MAX_FAILURE_FRACTION * total as f64 {
        return Err(Error::FailureThreshold {
            failed: record.failed.len(),
            total,
        });
    }
    Ok(ExperimentOutput {
        dir: dir.to_path_buf(),
        record,
        scaling,
    })
}

/// Runs every missing cell (at most `max_new_cells` of them) and, once all
/// cells exist, merges the results. Returns `None` while cells remain.
fn drive<E: Ensemble>(exp: &E, dir: &Path, max_new_cells: Option<usize>) -> Result<Option<ExperimentOutput>> {
    prepare_dir(exp, dir)?;
    let mut todo = missing_cells(exp, dir);
    let complete_after = max_new_cells.is_none_or(|m| m >= todo.len());
    if let Some(m) = max_new_cells {
        todo.truncate(m);
    }
    let workers = exp.section().effective_workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| {
        todo.par_iter()
            .map(|&(r, k)| run_one(exp, dir, r, k))
            .collect::<Result<Vec<()>>>()
    })?;
    if !complete_after {
        return Ok(None);
    }
    finalize(exp, dir, exp.section().window()).map(Some)
}

/// Runs the full chain experiment into `config.experiment.output_dir`,
/// reusing any cells already present for the same configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dir = config.experiment.output_dir.clone();
    Ok(drive(config, &dir, None)?.expect("complete run"))
}

/// Runs at most `max_new_cells` cells; `None` if the experiment is not yet
/// complete. Useful for bounded work slices.
pub fn run_experiment_partial(config: &ExperimentConfig, max_new_cells: usize) -> Result<Option<ExperimentOutput>> {
    config.validate()?;
    let dir = config.experiment.output_dir.clone();
    drive(config, &dir, Some(max_new_cells))
}

pub fn run_gl_experiment(config: &GlExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dir = config.experiment.output_dir.clone();
    Ok(drive(config, &dir, None)?.expect("complete run"))
}

enum Stored {
    Chain(ExperimentConfig),
    Field(GlExperimentConfig),
}

/// Loads the configuration stored in an output directory and checks it
/// against the manifest.
fn load_stored(dir: &Path) -> Result<Stored> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    let cfg_path = dir.join("config.toml");
    let text = fs::read_to_string(&cfg_path).map_err(|e| Error::io(&cfg_path, e))?;
    let (stored, hash) = match manifest.kind {
        ExperimentKind::Chain => {
            let mut c = ExperimentConfig::from_toml_str(&text)?;
            c.experiment.output_dir = dir.to_path_buf();
            let h = c.hash();
            (Stored::Chain(c), h)
        }
        ExperimentKind::Field => {
            let mut c = GlExperimentConfig::from_toml_str(&text)?;
            c.experiment.output_dir = dir.to_path_buf();
            let h = c.hash();
            (Stored::Field(c), h)
        }
    };
    if hash != manifest.config_hash {
        return Err(Error::ConfigMismatch {
            dir: dir.to_path_buf(),
            stored: manifest.config_hash,
            current: hash,
        });
    }
    Ok(stored)
}

/// Completes the missing cells of an interrupted experiment.
pub fn resume_experiment(dir: &Path) -> Result<ExperimentOutput> {
    match load_stored(dir)? {
        Stored::Chain(c) => Ok(drive(&c, dir, None)?.expect("complete run")),
        Stored::Field(c) => Ok(drive(&c, dir, None)?.expect("complete run")),
    }
}

/// Re-aggregates finished cells with an optional new upper edge of the fit
/// window and rewrites the summary files.
pub fn analyze_experiment(dir: &Path, window_max: Option<f64>) -> Result<ExperimentOutput> {
    match load_stored(dir)? {
        Stored::Chain(c) => {
            let mut w = c.experiment.window();
            if let Some(m) = window_max {
                w.max_ln_rate = m;
            }
            finalize(&c, dir, w)
        }
        Stored::Field(c) => {
            let mut w = c.experiment.window();
            if let Some(m) = window_max {
                w.max_ln_rate = m;
            }
            finalize(&c, dir, w)
        }
    }
}
