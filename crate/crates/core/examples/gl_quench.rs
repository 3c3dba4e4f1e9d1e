//! Continuum counterpart of the chain quench: a stochastic Ginzburg-Landau
//! field on a periodic grid. Prints the linear growth rates that set the
//! early domain size, then runs a few quenches and reports their windings.
//!
//! ```text
//! cargo run --release --example gl_quench -- 256 5
//! ```

use helix_kz::gl::{gl_growth_rate, gl_quench_run, GLParams};
use helix_kz::harness::ScheduleTemplate;

fn main() -> helix_kz::Result<()> {
    let mut args = std::env::args().skip(1);
    let tau_q: f64 = args.next().map_or(256.0, |s| s.parse().expect("tau_Q"));
    let runs: u64 = args.next().map_or(5, |s| s.parse().expect("runs"));

    let params = GLParams { grid_points: 800, domain_length: 400.0, ..GLParams::default() };
    println!("growth rate Im(omega) at delta = -1:");
    for k in [0.0, 0.25, 0.5, 1.0, 1.5] {
        println!("  k = {k:<5} {:+.5}", gl_growth_rate(&params, -1.0, k));
    }

    let template = ScheduleTemplate { t_thermalize: 20.0, t_relax: 100.0, ..ScheduleTemplate::default() };
    let schedule = template.with_tau_q(tau_q);
    for seed in 0..runs {
        let run = gl_quench_run(&params, &schedule, seed, 20)?;
        let amp = run.trace.snapshots.last().map_or(0.0, |s| s.mean_abs());
        println!("seed {seed}: W = {:+}, final <|A|> = {amp:.4}", run.final_winding);
    }
    Ok(())
}
