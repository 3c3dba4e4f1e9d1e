//! Command-line front end for running and analyzing quench ensembles.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use helix_kz::analysis::{half_normal_mean, kzm_freeze_out, kzm_predicted_mean_abs_w, sigma_w_from_domains};
use helix_kz::harness::{
    analyze_experiment, resume_experiment, run_experiment, run_gl_experiment, ExperimentConfig, ExperimentOutput,
    GlExperimentConfig,
};
use helix_kz::Error;

#[derive(Parser)]
#[command(name = "helixkz", version, about = "Kibble-Zurek quench ensembles of a ring ion chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a particle experiment from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Complete the missing trajectories of an output directory.
    Resume {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Re-aggregate an output directory, optionally with a new fit window edge.
    Analyze {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window_max: Option<f64>,
    },
    /// Run a field-theory experiment from a TOML config.
    GlRun {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the freeze-out estimate of the mean absolute winding number.
    PredictKzm {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        delta0: f64,
        #[arg(long)]
        tauq: f64,
    },
}

fn report(out: &ExperimentOutput) {
    println!("output: {}", out.dir.display());
    println!(
        "trajectories: {} done, {} failed, {} unsettled",
        out.record.trajectories.len(),
        out.record.failed.len(),
        out.record.unsettled()
    );
    for r in &out.scaling.records {
        println!(
            "tau_Q {:>12.3}  ln(1/tau_Q) {:>8.3}  <|W|> {:.4} +- {:.4}  sigma_W {:.4}",
            r.tau_q,
            r.ln_inv_rate(),
            r.stats.mean_abs_w,
            r.stats.mean_abs_stderr,
            r.stats.sigma_w
        );
    }
    match &out.scaling.fit {
        Some(f) => println!(
            "fit: exponent {:.4}, regression coefficient {:.4}, {} points",
            f.exponent, f.regression_coefficient, f.n_points
        ),
        None => println!("fit: fewer than two rates in the window"),
    }
}

fn execute(cmd: Command) -> helix_kz::Result<()> {
    match cmd {
        Command::Run { config } => report(&run_experiment(&ExperimentConfig::load(&config)?)?),
        Command::Resume { dir } => report(&resume_experiment(&dir)?),
        Command::Analyze { dir, window_max } => report(&analyze_experiment(&dir, window_max)?),
        Command::GlRun { config } => report(&run_gl_experiment(&GlExperimentConfig::load(&config)?)?),
        Command::PredictKzm { n, eta, delta0, tauq } => {
            for (name, v) in [("n", n), ("eta", eta), ("delta0", delta0), ("tauq", tauq)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
                }
            }
            let w = kzm_predicted_mean_abs_w(n, eta, delta0, tauq);
            let f = kzm_freeze_out(eta, delta0, tauq);
            let sigma = sigma_w_from_domains(n, f.xi_hat);
            println!("t_hat       {:.6}", f.t_hat);
            println!("delta_hat   {:.6}", f.delta_hat);
            println!("xi_hat      {:.6}", f.xi_hat);
            println!("sigma_W     {:.6}", sigma);
            println!("mean_abs_W  {:.6}", w);
            debug_assert!((half_normal_mean(sigma) - w).abs() <= 1e-9 * w.max(1.0));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_config_error() {
                2
            } else if matches!(e, Error::FailureThreshold { .. }) {
                3
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}
