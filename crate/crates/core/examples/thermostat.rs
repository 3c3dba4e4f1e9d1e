//! Thermalizes a ring at fixed trap frequency and compares the kinetic
//! temperature with the thermostat setting. Also shows what the chosen
//! temperature does to the crystal: the fraction of neighbor pairs whose
//! axial order is violated.
//!
//! ```text
//! cargo run --example thermostat -- 64 3.5
//! cargo run --example thermostat -- 64 0.0035
//! ```

use helix_kz::analysis::check_ring_order;
use helix_kz::{ChainState, ForceField, LangevinIntegrator, ThermostatParams};

fn main() -> helix_kz::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(64, |s| s.parse().expect("N"));
    let kt: f64 = args.next().map_or(3.5, |s| s.parse().expect("kT"));
    let eta = 4.38;
    let dt = 0.01;
    let nu = 2.54;

    let mut state = ChainState::equally_spaced(n);
    let field = ForceField::new(nu, state.box_length)?;
    let mut integ = LangevinIntegrator::new(ThermostatParams { eta, kt }, dt, 42);
    integ.thermalize(&mut state, &field, 2000)?;

    let samples = 20_000;
    let mut violations = 0;
    let ke = integ.thermalize(&mut state, &field, samples)?;
    for _ in 0..100 {
        integ.thermalize(&mut state, &field, 10)?;
        if check_ring_order(&state).is_err() {
            violations += 1;
        }
    }
    let mean_ke = ke.iter().sum::<f64>() / ke.len() as f64;
    let per_dof = mean_ke / (3 * n) as f64;
    println!("N = {n}, eta = {eta}, kT = {kt}, nu_t = {nu}, dt = {dt}");
    println!("<KE>/dof = {per_dof:.5}   kT/2 = {:.5}   ratio = {:.4}", kt / 2.0, per_dof / (kt / 2.0));
    println!("snapshots with broken axial order: {violations} / 100");
    Ok(())
}
