use num_complex::Complex64;
use proptest::prelude::*;

use helix_kz::gl::{gl_quench_run, gl_step, GLField, GLParams, GLStepper};
use helix_kz::harness::ScheduleTemplate;

#[test]
fn very_slow_quench_of_a_short_ring_leaves_no_winding() {
    let params = GLParams { grid_points: 16, domain_length: 8.0, dt: 0.05, ..GLParams::default() };
    let schedule =
        ScheduleTemplate { nu_start: 2.54, nu_end: 1.68, t_thermalize: 20.0, t_relax: 100.0 }.with_tau_q(4000.0);
    let unwound = (0..50)
        .filter(|&seed| gl_quench_run(&params, &schedule, seed, 4).unwrap().final_winding == 0)
        .count();
    assert!(unwound as f64 / 50.0 > 0.9, "{unwound} of 50 runs unwound");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn deterministic_dynamics_commute_with_global_phase(
        phi in 0.0..std::f64::consts::TAU,
        delta in -1.5..1.5f64,
        seed in any::<u64>(),
    ) {
        let params = GLParams { noise_kt: 0.0, grid_points: 32, domain_length: 16.0, dt: 0.02, ..GLParams::default() };
        let mut rng = helix_kz::rng::NoiseStream::new(seed);
        let mut a = GLField::zeros(32);
        for (x, p) in a.a.iter_mut().zip(a.p.iter_mut()) {
            let (u, v) = rng.normal_pair();
            let (s, t) = rng.normal_pair();
            *x = Complex64::new(u, v) * 0.1;
            *p = Complex64::new(s, t) * 0.1;
        }
        let rot = Complex64::from_polar(1.0, phi);
        let mut b = a.clone();
        b.a.iter_mut().chain(b.p.iter_mut()).for_each(|z| *z *= rot);
        let mut sa = GLStepper::new(params, 0);
        let mut sb = GLStepper::new(params, 0);
        for _ in 0..200 {
            gl_step(&mut a, &params, delta, &mut sa).unwrap();
            gl_step(&mut b, &params, delta, &mut sb).unwrap();
        }
        for (za, zb) in a.a.iter().zip(&b.a) {
            prop_assert!((za * rot - zb).norm() < 1e-12);
        }
    }
}
