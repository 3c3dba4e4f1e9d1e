//! Locates the linear-zigzag instability of an on-axis ring, statically from
//! the transverse Hessian and dynamically from the growth or decay of a small
//! zigzag perturbation.
//!
//! ```text
//! cargo run --example critical_point -- 128
//! ```

use helix_kz::analysis::order_parameter;
use helix_kz::forces::{linear_chain_instability_frequency, min_transverse_eigenvalue};
use helix_kz::units::{critical_frequency, zeta3};
use helix_kz::{ChainState, ForceField, LangevinIntegrator, ThermostatParams};

fn max_amplitude(state: &ChainState) -> f64 {
    order_parameter(state).abs().fold(0.0, f64::max)
}

fn main() -> helix_kz::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(128, |s| s.parse().expect("N must be an integer"));
    let nu_c = critical_frequency();
    println!("zeta(3)              = {:.12}", zeta3());
    println!("infinite-chain nu_c  = {nu_c:.6}");

    let nu_n = linear_chain_instability_frequency(n, 1e-10);
    println!("N = {n} ring          = {nu_n:.6}  ({:+.3}% vs nu_c)", 100.0 * (nu_n / nu_c - 1.0));
    for f in [0.95, 1.0, 1.05] {
        let nu = f * nu_c;
        println!("  min transverse eigenvalue at {f:.2} nu_c: {:+.5}", min_transverse_eigenvalue(n, nu));
    }

    // zigzag seed of amplitude 1e-3 in y, then deterministic damped dynamics
    let thermostat = ThermostatParams { eta: 0.5, kt: 0.0 };
    for f in [1.05, 0.95] {
        let mut state = ChainState::equally_spaced(n);
        for (j, r) in state.positions.iter_mut().enumerate() {
            r[1] = if j % 2 == 0 { 1e-3 } else { -1e-3 };
        }
        let field = ForceField::new(f * nu_c, state.box_length)?;
        let mut integ = LangevinIntegrator::new(thermostat, 0.01, 0);
        let before = max_amplitude(&state);
        for _ in 0..2000 {
            integ.step(&mut state, &field)?;
        }
        let after = max_amplitude(&state);
        let verdict = if after < before { "decays" } else { "grows" };
        println!("nu_t = {f:.2} nu_c: max|A| {before:.2e} -> {after:.2e} over t = 20 ({verdict})");
    }
    Ok(())
}
