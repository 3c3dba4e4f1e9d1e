//! Runs a quench-rate ensemble described by a TOML file, then prints the
//! per-rate statistics, the power-law fit and the freeze-out comparison.
//! An interrupted run picks up where it stopped when started again with the
//! same config.
//!
//! ```text
//! cargo run --release --example ensemble -- crates/core/examples/configs/synthetic.toml
//! cargo run --release --example ensemble -- crates/core/examples/configs/small_chain.toml
//! ```

use std::path::PathBuf;

use helix_kz::analysis::kzm_predicted_mean_abs_w;
use helix_kz::harness::{run_experiment, ExperimentConfig};

fn main() -> helix_kz::Result<()> {
    let path = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/synthetic.toml").into()),
    );
    let config = ExperimentConfig::load(&path)?;
    let out = run_experiment(&config)?;
    let delta0 = out.record.delta0;
    let n = config.sim.n_ions as f64;

    println!("{:>10} {:>9} {:>6} {:>8} {:>8} {:>8} {:>7}", "tau_Q", "ln(1/tQ)", "runs", "<|W|>", "sigma_W", "KZM", "ratio");
    for r in &out.scaling.records {
        let kzm = kzm_predicted_mean_abs_w(n, config.sim.eta, delta0, r.tau_q);
        println!(
            "{:>10.1} {:>9.3} {:>6} {:>8.3} {:>8.3} {:>8.3} {:>7.2}",
            r.tau_q,
            r.ln_inv_rate(),
            r.stats.n,
            r.stats.mean_abs_w,
            r.stats.sigma_w,
            kzm,
            kzm / r.stats.mean_abs_w
        );
    }
    if let Some(fit) = &out.scaling.fit {
        println!(
            "<|W|> ~ tau_Q^-{:.4}  (r = {:.3}, {} rates with ln(1/tau_Q) < {})",
            fit.exponent, fit.regression_coefficient, fit.n_points, fit.window.max_ln_rate
        );
    }
    println!("results in {}", out.dir.display());
    Ok(())
}
