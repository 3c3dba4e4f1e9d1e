//! Freeze-out estimate of the winding-number statistics across a range of
//! quench times, step by step.
//!
//! ```text
//! cargo run --example kzm_prediction -- 400
//! ```

use helix_kz::analysis::{half_normal_mean, kzm_freeze_out, kzm_predicted_mean_abs_w, sigma_w_from_domains};
use helix_kz::QuenchSchedule;

fn main() {
    let n: f64 = std::env::args().nth(1).map_or(400.0, |s| s.parse().expect("N"));
    let eta = 4.38;
    let schedule = QuenchSchedule::with_tau_q(1.0);
    let delta0 = schedule.delta0();
    println!("N = {n}, eta = {eta}, delta0 = {delta0:.4} (at nu_c: {:.4})", schedule.delta0_at_critical());
    println!("{:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "ln(1/tQ)", "t_hat", "xi_hat", "sigma_W", "<|W|>", "closed");
    for i in 0..=12 {
        let ln_rate = -9.0 + 0.5 * i as f64;
        let tau_q = (-ln_rate).exp();
        let f = kzm_freeze_out(eta, delta0, tau_q);
        let sigma = sigma_w_from_domains(n, f.xi_hat);
        println!(
            "{:>9.2} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            ln_rate,
            f.t_hat,
            f.xi_hat,
            sigma,
            half_normal_mean(sigma),
            kzm_predicted_mean_abs_w(n, eta, delta0, tau_q)
        );
    }
}
