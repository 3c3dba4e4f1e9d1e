//! Configuration, ensemble execution and persistence.

pub mod config;
pub mod experiment;
pub mod io;
pub mod trajectory;

pub use config::{
    EnsembleSection, ExperimentConfig, GlExperimentConfig, ScheduleTemplate, TrajectoryMode, WORKERS_ENV,
};
pub use experiment::{
    analyze_experiment, resume_experiment, run_experiment, run_experiment_partial, run_gl_experiment,
    ExperimentKind, ExperimentOutput, RunRecord, TrajectoryRecord,
};
pub use io::{read_results_csv, ResultsRow};
pub use trajectory::{run_gl_trajectory, run_trajectory, TrajectoryOutcome};
