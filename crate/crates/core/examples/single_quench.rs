//! One quench of a ring through the zigzag transition. Prints the evolution
//! of the mean zigzag amplitude and winding number and writes the sampled
//! order-parameter trace as CSV.
//!
//! ```text
//! cargo run --example single_quench -- 128 0.0035 1000 7 trace.csv
//! ```
//!
//! Arguments: ion count, kT, tau_Q, seed, output path.

use std::path::PathBuf;

use helix_kz::analysis::{default_slip_threshold, phase_slip_events};
use helix_kz::harness::io::{trace_csv, write_atomic};
use helix_kz::harness::{run_trajectory, EnsembleSection, ExperimentConfig, ScheduleTemplate, TrajectoryMode};
use helix_kz::SimParams;

fn main() -> helix_kz::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(128, |s| s.parse().expect("N"));
    let kt: f64 = args.next().map_or(0.0035, |s| s.parse().expect("kT"));
    let tau_q: f64 = args.next().map_or(1000.0, |s| s.parse().expect("tau_Q"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "trace.csv".into()));

    let config = ExperimentConfig {
        sim: SimParams { n_ions: n, kt, seed, ..SimParams::default() },
        schedule: ScheduleTemplate::default(),
        experiment: EnsembleSection {
            tau_q: vec![tau_q],
            runs_per_rate: 1,
            snapshots_per_trajectory: 60,
            output_dir: PathBuf::new(),
            workers: 1,
            trace_cells: Vec::new(),
            full_trace_stride: None,
            fit_max_ln_rate: -4.0,
            fit_min_ln_rate: None,
            mode: TrajectoryMode::Physics,
        },
    };
    config.validate()?;
    let schedule = config.schedule_for(0);
    println!(
        "ramp {:.0} -> {:.0}, nu_c crossed at t = {:.1}",
        schedule.ramp_start(),
        schedule.ramp_end(),
        schedule.critical_crossing_time()?
    );
    let outcome = run_trajectory(&config, 0, 0)?;
    println!("{:>9} {:>7} {:>10} {:>4}", "t", "nu_t", "<|A|>", "W");
    for s in &outcome.trace.snapshots {
        let w = s.winding.map_or("-".to_string(), |w| w.to_string());
        println!("{:>9.1} {:>7.4} {:>10.5} {:>4}", s.time, schedule.nu_t(s.time), s.mean_abs(), w);
    }
    let slips = phase_slip_events(&outcome.trace, default_slip_threshold(&outcome.trace));
    for s in &slips {
        println!("phase slip near ion {} at t = {:.1}", s.ion, s.time);
    }
    println!("final W = {}, settled = {}", outcome.final_winding, outcome.settled);
    write_atomic(&out, &trace_csv(&outcome.trace.snapshots, "ion_index")?)?;
    println!("trace written to {}", out.display());
    Ok(())
}
