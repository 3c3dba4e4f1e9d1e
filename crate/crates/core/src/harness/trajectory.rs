//! Single trajectories: the full quench protocol for the ion chain, the
//! synthetic stand-in, and the field-theory counterpart.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_ring_order, default_slip_threshold, order_parameter, phase_slip_events, winding_number,
    WindingTrace,
};
use crate::error::Result;
use crate::forces::ChainState;
use crate::gl::gl_quench_run;
use crate::integrator::{LangevinIntegrator, ThermostatParams};
use crate::rng::{trajectory_seed, NoiseStream};

use super::config::{ExperimentConfig, GlExperimentConfig, TrajectoryMode};

/// Fraction of the relaxation phase over which the winding number must stay
/// constant for a trajectory to count as settled.
pub const SETTLE_FRACTION: f64 = 0.1;
/// Winding checks inside the settling window.
const SETTLE_CHECKS: u64 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    pub trace: WindingTrace,
    pub final_winding: i64,
    pub phase_slips: usize,
    /// `W` unchanged over the last part of the relaxation phase.
    pub settled: bool,
    pub max_abs_amplitude: f64,
}

/// Runs the protocol for cell `(rate_index, run_index)`: equally spaced ions
/// at rest, thermalization at `nu_start`, linear ramp over `tau_q`,
/// relaxation at `nu_end`.
pub fn run_trajectory(
    config: &ExperimentConfig,
    rate_index: usize,
    run_index: usize,
) -> Result<TrajectoryOutcome> {
    let seed = trajectory_seed(config.sim.seed, rate_index, run_index);
    let schedule = config.schedule_for(rate_index);
    let ens = &config.experiment;
    if let TrajectoryMode::Synthetic { sigma_ref } = ens.mode {
        return Ok(synthetic_trajectory(seed, &schedule, sigma_ref));
    }
    let sim = &config.sim;
    let dt = sim.dt;
    let thermostat = ThermostatParams {
        eta: sim.eta,
        kt: sim.kt,
    };
    let mut state = ChainState::equally_spaced(sim.n_ions);
    let mut integ = LangevinIntegrator::new(thermostat, dt, seed);

    let n_steps = (schedule.total_duration() / dt).round() as u64;
    let traced = ens.trace_cells.contains(&(rate_index, run_index));
    let stride = match (traced, ens.full_trace_stride) {
        (true, Some(s)) => s.max(1),
        _ => (n_steps / ens.snapshots_per_trajectory as u64).max(1),
    };
    let settle_steps = ((SETTLE_FRACTION * schedule.t_relax / dt).round() as u64).min(n_steps);
    let settle_start = n_steps - settle_steps;
    let check_stride = (settle_steps / SETTLE_CHECKS).max(1);

    let mut snapshots = Vec::with_capacity((n_steps / stride) as usize + 1);
    let mut settle_w: Option<i64> = None;
    let mut settled = true;
    let mut max_abs: f64 = 0.0;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        integ.step_ramped(&mut state, schedule.nu_t(t), schedule.nu_t(t + dt))?;
        let done = k + 1;
        let sample = done % stride == 0 || done == n_steps;
        let check = settle_steps > 0 && done >= settle_start && (done - settle_start).is_multiple_of(check_stride);
        if sample || check {
            let snap = order_parameter(&state).with_winding()?;
            if check || done == n_steps {
                let w = snap.winding.unwrap_or(0);
                match settle_w {
                    None => settle_w = Some(w),
                    Some(prev) if prev != w => settled = false,
                    _ => {}
                }
            }
            if sample {
                check_ring_order(&state)?;
                max_abs = snap.abs().fold(max_abs, f64::max);
                snapshots.push(snap);
            }
        }
    }
    let final_winding = winding_number(&order_parameter(&state))?;
    let mut trace = WindingTrace {
        seed,
        schedule,
        snapshots,
        final_winding,
    };
    trace.snapshots.dedup_by(|b, a| a.time == b.time);
    let threshold = default_slip_threshold(&trace);
    let phase_slips = if threshold > 0.0 {
        phase_slip_events(&trace, threshold).len()
    } else {
        0
    };
    Ok(TrajectoryOutcome {
        trace,
        final_winding,
        phase_slips,
        settled,
        max_abs_amplitude: max_abs,
    })
}

fn synthetic_trajectory(
    seed: u64,
    schedule: &crate::schedule::QuenchSchedule,
    sigma_ref: f64,
) -> TrajectoryOutcome {
    let mut rng = NoiseStream::new(seed);
    let sigma = sigma_ref * schedule.tau_q.powf(-0.125);
    let w = (sigma * rng.normal_pair().0).round() as i64;
    TrajectoryOutcome {
        trace: WindingTrace {
            seed,
            schedule: *schedule,
            snapshots: Vec::new(),
            final_winding: w,
        },
        final_winding: w,
        phase_slips: 0,
        settled: true,
        max_abs_amplitude: 0.0,
    }
}

/// Field-theory trajectory for cell `(rate_index, run_index)`.
pub fn run_gl_trajectory(
    config: &GlExperimentConfig,
    rate_index: usize,
    run_index: usize,
) -> Result<TrajectoryOutcome> {
    let seed = trajectory_seed(config.seed, rate_index, run_index);
    let schedule = config.schedule.with_tau_q(config.experiment.tau_q[rate_index]);
    let run = gl_quench_run(&config.gl, &schedule, seed, config.experiment.snapshots_per_trajectory)?;
    let tail_start = schedule.total_duration() - SETTLE_FRACTION * schedule.t_relax;
    let mut tail = run
        .trace
        .snapshots
        .iter()
        .filter(|s| s.time >= tail_start)
        .filter_map(|s| s.winding);
    let first = tail.next();
    let settled = tail.all(|w| Some(w) == first);
    let threshold = default_slip_threshold(&run.trace);
    let phase_slips = if threshold > 0.0 {
        phase_slip_events(&run.trace, threshold).len()
    } else {
        0
    };
    let max_abs = run
        .trace
        .snapshots
        .iter()
        .flat_map(|s| s.abs())
        .fold(0.0, f64::max);
    Ok(TrajectoryOutcome {
        final_winding: run.final_winding,
        trace: run.trace,
        phase_slips,
        settled,
        max_abs_amplitude: max_abs,
    })
}

/// Wall-clock timing wrapper.
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}
