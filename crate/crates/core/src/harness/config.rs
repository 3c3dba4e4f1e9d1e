//! Experiment configuration files (TOML). Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::RateWindow;
use crate::error::{Error, Result};
use crate::gl::GLParams;
use crate::schedule::{QuenchSchedule, DEFAULT_NU_END, DEFAULT_NU_START};
use crate::units::SimParams;

/// Environment variable that overrides the configured worker count.
pub const WORKERS_ENV: &str = "HELIXKZ_WORKERS";

/// Quench schedule without its ramp time; one is instantiated per rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleTemplate {
    pub nu_start: f64,
    pub nu_end: f64,
    pub t_thermalize: f64,
    pub t_relax: f64,
}

impl Default for ScheduleTemplate {
    fn default() -> Self {
        let s = QuenchSchedule::with_tau_q(1.0);
        ScheduleTemplate {
            nu_start: DEFAULT_NU_START,
            nu_end: DEFAULT_NU_END,
            t_thermalize: s.t_thermalize,
            t_relax: s.t_relax,
        }
    }
}

impl ScheduleTemplate {
    pub fn with_tau_q(&self, tau_q: f64) -> QuenchSchedule {
        QuenchSchedule {
            nu_start: self.nu_start,
            nu_end: self.nu_end,
            tau_q,
            t_thermalize: self.t_thermalize,
            t_relax: self.t_relax,
        }
    }
}

/// How a trajectory is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum TrajectoryMode {
    /// Full Langevin simulation of the chain.
    #[default]
    Physics,
    /// Stand-in that draws `W = round(sigma_ref * tau_q^(-1/8) * z)`, used
    /// to exercise the pipeline and the fit.
    Synthetic { sigma_ref: f64 },
}

fn default_snapshots() -> usize {
    200
}

fn default_workers() -> usize {
    1
}

fn default_fit_max() -> f64 {
    RateWindow::default().max_ln_rate
}

/// Rate grid, ensemble size and bookkeeping shared by particle and field
/// experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub tau_q: Vec<f64>,
    pub runs_per_rate: usize,
    #[serde(default = "default_snapshots")]
    pub snapshots_per_trajectory: usize,
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// `(rate index, run index)` cells whose sampled trace is written to CSV.
    #[serde(default)]
    pub trace_cells: Vec<(usize, usize)>,
    /// Snapshot every this many steps for the traced cells instead of the
    /// regular sampling.
    #[serde(default)]
    pub full_trace_stride: Option<u64>,
    #[serde(default = "default_fit_max")]
    pub fit_max_ln_rate: f64,
    #[serde(default)]
    pub fit_min_ln_rate: Option<f64>,
    #[serde(default)]
    pub mode: TrajectoryMode,
}

impl EnsembleSection {
    pub fn validate(&self) -> Result<()> {
        if self.tau_q.is_empty() {
            return Err(Error::Config("tau_q list is empty".into()));
        }
        if self.tau_q.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Config("tau_q values must be positive".into()));
        }
        if self.tau_q.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("tau_q list must be strictly increasing".into()));
        }
        if self.runs_per_rate == 0 {
            return Err(Error::Config("runs_per_rate must be >= 1".into()));
        }
        if self.snapshots_per_trajectory == 0 {
            return Err(Error::Config("snapshots_per_trajectory must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if let TrajectoryMode::Synthetic { sigma_ref } = self.mode {
            if !(sigma_ref > 0.0) {
                return Err(Error::Config("synthetic sigma_ref must be positive".into()));
            }
        }
        for &(r, k) in &self.trace_cells {
            if r >= self.tau_q.len() || k >= self.runs_per_rate {
                return Err(Error::Config(format!("trace cell ({r}, {k}) out of range")));
            }
        }
        Ok(())
    }

    pub fn window(&self) -> RateWindow {
        RateWindow {
            min_ln_rate: self.fit_min_ln_rate.unwrap_or(f64::NEG_INFINITY),
            max_ln_rate: self.fit_max_ln_rate,
        }
    }

    /// Worker count after applying the environment override.
    pub fn effective_workers(&self) -> usize {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or(self.workers)
    }

    pub fn n_cells(&self) -> usize {
        self.tau_q.len() * self.runs_per_rate
    }
}

/// Particle experiment: `[sim]`, `[schedule]`, `[experiment]`.
/// `sim.seed` is the global seed from which every trajectory seed derives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sim: SimParams,
    pub schedule: ScheduleTemplate,
    pub experiment: EnsembleSection,
}

/// Field experiment: `[gl]`, `[schedule]`, `[experiment]` plus the global seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlExperimentConfig {
    pub seed: u64,
    pub gl: GLParams,
    pub schedule: ScheduleTemplate,
    pub experiment: EnsembleSection,
}

fn validate_schedule(t: &ScheduleTemplate, tau_q: &[f64], require_crossing: bool) -> Result<()> {
    for &tq in tau_q {
        let s = t.with_tau_q(tq);
        if require_crossing {
            s.validate_crossing()?;
        } else {
            s.validate()?;
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.experiment.validate()?;
        let nu_max = self.schedule.nu_start.max(self.schedule.nu_end);
        self.sim.validate(nu_max)?;
        // a schedule that never crosses nu_c is allowed (control runs)
        validate_schedule(&self.schedule, &self.experiment.tau_q, false)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// Hash of everything that affects results (not the output location or
    /// the worker count).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.experiment.output_dir = PathBuf::new();
        c.experiment.workers = 1;
        hash_json(&c)
    }

    pub fn schedule_for(&self, rate_index: usize) -> QuenchSchedule {
        self.schedule.with_tau_q(self.experiment.tau_q[rate_index])
    }
}

impl GlExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.experiment.validate()?;
        self.gl.validate()?;
        validate_schedule(&self.schedule, &self.experiment.tau_q, true)?;
        for &tq in &self.experiment.tau_q {
            let s = self.schedule.with_tau_q(tq);
            for t in [0.0, s.total_duration()] {
                self.gl.check_timestep(s.delta(t))?;
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.experiment.output_dir = PathBuf::new();
        c.experiment.workers = 1;
        hash_json(&c)
    }
}

fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes to JSON");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[sim]
n_ions = 16
eta = 4.38
kt = 0.0035
dt = 0.02
seed = 7

[schedule]
nu_start = 2.54
nu_end = 1.68
t_thermalize = 10.0
t_relax = 20.0

[experiment]
tau_q = [10.0, 20.0]
runs_per_rate = 3
output_dir = "out"
"#;

    #[test]
    fn parses_and_applies_defaults() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.sim.n_ions, 16);
        assert_eq!(cfg.experiment.snapshots_per_trajectory, 200);
        assert_eq!(cfg.experiment.workers, 1);
        assert_eq!(cfg.experiment.mode, TrajectoryMode::Physics);
        assert_eq!(cfg.experiment.window().max_ln_rate, -4.0);
        assert_eq!(cfg.schedule_for(1).tau_q, 20.0);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = SAMPLE.replace("seed = 7", "seed = 7\nbogus = 1");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("runs_per_rate = 3", "runs_per_rate = 3\nextra = true");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn invalid_values_are_errors() {
        for (from, to) in [
            ("tau_q = [10.0, 20.0]", "tau_q = []"),
            ("tau_q = [10.0, 20.0]", "tau_q = [20.0, 10.0]"),
            ("tau_q = [10.0, 20.0]", "tau_q = [-1.0, 10.0]"),
            ("runs_per_rate = 3", "runs_per_rate = 0"),
            ("n_ions = 16", "n_ions = 15"),
            ("dt = 0.02", "dt = 0.5"),
        ] {
            let bad = SAMPLE.replace(from, to);
            assert!(ExperimentConfig::from_toml_str(&bad).is_err(), "{to}");
        }
    }

    #[test]
    fn hash_ignores_workers_and_location() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let mut other = cfg.clone();
        other.experiment.workers = 8;
        other.experiment.output_dir = "elsewhere".into();
        assert_eq!(cfg.hash(), other.hash());
        other.sim.seed = 8;
        assert_ne!(cfg.hash(), other.hash());
    }

    #[test]
    fn synthetic_mode_parses() {
        let text = SAMPLE.replace(
            "output_dir = \"out\"",
            "output_dir = \"out\"\nmode = { kind = \"synthetic\", sigma_ref = 20.0 }",
        );
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.experiment.mode, TrajectoryMode::Synthetic { sigma_ref: 20.0 });
    }
}
