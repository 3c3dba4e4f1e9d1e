//! Stochastic Ginzburg-Landau field on a periodic grid.
//!
//! Integrates
//! `A_tt + eta A_t - h^2 A_xx + delta A + g |A|^2 A = noise`
//! for a complex field `A` sampled at `M` points of a ring of length `C`,
//! with the Laplacian by central differences. The time stepping is the same
//! half-kick / exact Ornstein-Uhlenbeck flight / half-kick splitting used for
//! the ions, applied independently to the real and imaginary parts at each
//! grid point. Each grid point carries mass `dx`, so the noise variance per
//! point is `noise_kt / dx` and the continuum limit is white in space.
//!
//! An overdamped variant, `eta A_t = h^2 A_xx - delta A - g |A|^2 A + noise`,
//! is available for comparison with the overdamped scaling argument; it uses
//! Euler-Maruyama.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{winding_of_phases, OrderSnapshot, WindingTrace, ZeroPhase};
use crate::error::{Error, Result};
use crate::integrator::{FlightCoefficients, ThermostatParams};
use crate::rng::NoiseStream;
use crate::schedule::QuenchSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GLParams {
    /// Gradient stiffness.
    pub h: f64,
    /// Quartic coupling.
    pub g: f64,
    pub eta: f64,
    pub noise_kt: f64,
    pub grid_points: usize,
    pub domain_length: f64,
    pub dt: f64,
    #[serde(default)]
    pub overdamped: bool,
}

impl Default for GLParams {
    fn default() -> Self {
        GLParams {
            h: 1.0,
            // zigzag amplitude of ~0.28 a at the final delta of the default ramp
            g: 17.6,
            eta: 4.38,
            noise_kt: 1e-3,
            grid_points: 400,
            domain_length: 400.0,
            dt: 0.05,
            overdamped: false,
        }
    }
}

impl GLParams {
    pub fn dx(&self) -> f64 {
        self.domain_length / self.grid_points as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.g > 0.0) {
            return Err(Error::Config("h and g must be positive".into()));
        }
        if !(self.eta >= 0.0 && self.noise_kt >= 0.0) {
            return Err(Error::Config("eta and noise_kt must be >= 0".into()));
        }
        if self.grid_points < 8 {
            return Err(Error::Config("grid needs at least 8 points".into()));
        }
        if !(self.domain_length > 0.0 && self.dt > 0.0) {
            return Err(Error::Config("domain length and dt must be positive".into()));
        }
        if self.overdamped && !(self.eta > 0.0) {
            return Err(Error::Config("overdamped dynamics needs eta > 0".into()));
        }
        Ok(())
    }

    /// Stability guard of the explicit scheme at control parameter `delta`.
    pub fn check_timestep(&self, delta: f64) -> Result<()> {
        let dx = self.dx();
        let ok = if self.overdamped {
            let diffusive = self.eta * dx * dx / (2.0 * self.h * self.h);
            let reaction = if delta != 0.0 { self.eta / delta.abs() } else { f64::INFINITY };
            self.dt < 0.5 * diffusive.min(reaction)
        } else {
            let mut limit = dx / self.h;
            if self.eta > 0.0 {
                limit = limit.min(1.0 / self.eta);
            }
            if delta != 0.0 {
                limit = limit.min(1.0 / delta.abs().sqrt());
            }
            self.dt < 0.5 * limit
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "dt = {} too large for dx = {dx}, h = {}, eta = {}, delta = {delta}",
                self.dt, self.h, self.eta
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GLField {
    pub time: f64,
    pub a: Vec<Complex64>,
    /// `dA/dt`
    pub p: Vec<Complex64>,
}

impl GLField {
    pub fn zeros(m: usize) -> Self {
        GLField {
            time: 0.0,
            a: vec![Complex64::new(0.0, 0.0); m],
            p: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.p).all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `h^2 A_xx - delta A - g |A|^2 A` at every grid point.
fn gl_force(a: &[Complex64], params: &GLParams, delta: f64, out: &mut [Complex64]) {
    let m = a.len();
    let dx = params.dx();
    let k = params.h * params.h / (dx * dx);
    for i in 0..m {
        let left = a[(i + m - 1) % m];
        let right = a[(i + 1) % m];
        let ai = a[i];
        out[i] = k * (left + right - 2.0 * ai) - (delta + params.g * ai.norm_sqr()) * ai;
    }
}

/// Stepper that owns the noise stream and scratch buffers for one run.
#[derive(Debug, Clone)]
pub struct GLStepper {
    params: GLParams,
    flight: FlightCoefficients,
    noise: NoiseStream,
    force: Vec<Complex64>,
    steps: u64,
}

impl GLStepper {
    pub fn new(params: GLParams, seed: u64) -> Self {
        let thermostat = ThermostatParams {
            eta: params.eta,
            kt: params.noise_kt / params.dx(),
        };
        GLStepper {
            params,
            flight: FlightCoefficients::new(thermostat, params.dt),
            noise: NoiseStream::new(seed),
            force: vec![Complex64::new(0.0, 0.0); params.grid_points],
            steps: 0,
        }
    }

    pub fn params(&self) -> &GLParams {
        &self.params
    }

    /// One step with the control parameter moving from `delta_start` to
    /// `delta_end` across the step.
    pub fn step_ramped(&mut self, field: &mut GLField, delta_start: f64, delta_end: f64) -> Result<()> {
        let dt = self.params.dt;
        let m = field.a.len();
        if self.params.overdamped {
            gl_force(&field.a, &self.params, 0.5 * (delta_start + delta_end), &mut self.force);
            let eta = self.params.eta;
            let amp = (2.0 * self.params.noise_kt / self.params.dx() * dt / eta).sqrt();
            if amp > 0.0 {
                self.noise.seek(self.steps, m as u64);
            }
            for i in 0..m {
                let drift = self.force[i] * (dt / eta);
                let kick = if amp > 0.0 {
                    let (u, v) = self.noise.normal_pair();
                    Complex64::new(u, v) * amp
                } else {
                    Complex64::new(0.0, 0.0)
                };
                field.a[i] += drift + kick;
                field.p[i] = self.force[i] / eta;
            }
        } else {
            let half = 0.5 * dt;
            gl_force(&field.a, &self.params, delta_start, &mut self.force);
            for (p, f) in field.p.iter_mut().zip(&self.force) {
                *p += half * f;
            }
            let fc = self.flight;
            if fc.is_noisy() {
                self.noise.seek(self.steps, 2 * m as u64);
                for (a, p) in field.a.iter_mut().zip(field.p.iter_mut()) {
                    let (z1, z2) = self.noise.normal_pair();
                    let (w1, w2) = self.noise.normal_pair();
                    let p0 = *p;
                    *p = fc.decay * p0 + fc.sigma_v * Complex64::new(z1, w1);
                    *a += fc.drift * p0
                        + fc.x_from_v * Complex64::new(z1, w1)
                        + fc.sigma_x_cond * Complex64::new(z2, w2);
                }
            } else {
                for (a, p) in field.a.iter_mut().zip(field.p.iter_mut()) {
                    let p0 = *p;
                    *p = fc.decay * p0;
                    *a += fc.drift * p0;
                }
            }
            gl_force(&field.a, &self.params, delta_end, &mut self.force);
            for (p, f) in field.p.iter_mut().zip(&self.force) {
                *p += half * f;
            }
        }
        field.time += dt;
        self.steps += 1;
        if !field.is_finite() {
            return Err(Error::Blowup { step: self.steps });
        }
        Ok(())
    }
}

/// One step at fixed control parameter.
pub fn gl_step(field: &mut GLField, params: &GLParams, delta: f64, stepper: &mut GLStepper) -> Result<()> {
    debug_assert_eq!(stepper.params(), params);
    params.check_timestep(delta)?;
    stepper.step_ramped(field, delta, delta)
}

/// Both roots of the linearized dispersion relation,
/// `Omega = -i eta / 2 +- sqrt(4 (h^2 k^2 + delta) - eta^2) / 2`,
/// for plane waves `exp(-i Omega t + i k x)`; `Im Omega > 0` grows.
pub fn gl_dispersion(params: &GLParams, delta: f64, k: f64) -> [Complex64; 2] {
    let disc = Complex64::new(4.0 * (params.h * params.h * k * k + delta) - params.eta * params.eta, 0.0);
    let root = 0.5 * disc.sqrt();
    let base = Complex64::new(0.0, -0.5 * params.eta);
    [base + root, base - root]
}

/// Largest `Im Omega` at wavenumber `k`.
pub fn gl_growth_rate(params: &GLParams, delta: f64, k: f64) -> f64 {
    let [a, b] = gl_dispersion(params, delta, k);
    a.im.max(b.im)
}

/// Discrete energy `dx sum [|p|^2/2 + delta |A|^2/2 + h^2 |dA/dx|^2/2 + g |A|^4/4]`.
pub fn gl_energy(field: &GLField, params: &GLParams, delta: f64, include_kinetic: bool) -> f64 {
    let m = field.a.len();
    let dx = params.dx();
    let mut e = 0.0;
    for i in 0..m {
        let a = field.a[i];
        let grad = (field.a[(i + 1) % m] - a) / dx;
        let a2 = a.norm_sqr();
        e += 0.5 * delta * a2 + 0.5 * params.h * params.h * grad.norm_sqr() + 0.25 * params.g * a2 * a2;
        if include_kinetic {
            e += 0.5 * field.p[i].norm_sqr();
        }
    }
    e * dx
}

pub fn gl_snapshot(field: &GLField, params: &GLParams) -> OrderSnapshot {
    let dx = params.dx();
    let x = (0..field.a.len()).map(|i| i as f64 * dx).collect();
    OrderSnapshot::from_field(field.time, x, field.a.clone(), ZeroPhase::Undefined)
}

/// Winding of the field around the grid (no staggering: the field is
/// already the envelope).
pub fn gl_winding(field: &GLField) -> Result<i64> {
    let snap = OrderSnapshot::from_field(field.time, Vec::new(), field.a.clone(), ZeroPhase::Undefined);
    winding_of_phases(&snap.phases)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GLRun {
    pub final_winding: i64,
    pub trace: WindingTrace,
    pub final_field: GLField,
}

/// Quenches the field through `delta = 0` following `schedule`
/// (`delta(t) = nu_t(t)^2 - nu_c^2`) and returns the final winding with
/// `n_snapshots` evenly spaced snapshots.
pub fn gl_quench_run(
    params: &GLParams,
    schedule: &QuenchSchedule,
    seed: u64,
    n_snapshots: usize,
) -> Result<GLRun> {
    params.validate()?;
    schedule.validate()?;
    let m = params.grid_points;
    let mut field = GLField::zeros(m);
    let delta0 = schedule.delta(0.0);
    for t in [0.0, schedule.total_duration()] {
        params.check_timestep(schedule.delta(t))?;
    }
    // equilibrium fluctuations of the linear phase
    let kt_site = params.noise_kt / params.dx();
    if kt_site > 0.0 {
        let mut init = NoiseStream::new(seed ^ 0x0005_eed0_fa11);
        let sd_a = if delta0 > 0.0 { (kt_site / delta0).sqrt() } else { kt_site.sqrt() };
        let sd_p = kt_site.sqrt();
        for (a, p) in field.a.iter_mut().zip(field.p.iter_mut()) {
            let (u, v) = init.normal_pair();
            *a = Complex64::new(u, v) * sd_a;
            if !params.overdamped {
                let (u, v) = init.normal_pair();
                *p = Complex64::new(u, v) * sd_p;
            }
        }
    }
    let mut stepper = GLStepper::new(*params, seed);
    let n_steps = (schedule.total_duration() / params.dt).ceil() as u64;
    let stride = (n_steps / n_snapshots.max(1) as u64).max(1);
    let mut snapshots = Vec::new();
    for k in 0..n_steps {
        let t = k as f64 * params.dt;
        stepper.step_ramped(&mut field, schedule.delta(t), schedule.delta(t + params.dt))?;
        if (k + 1) % stride == 0 || k + 1 == n_steps {
            snapshots.push(gl_snapshot(&field, params).with_winding()?);
        }
    }
    let final_winding = gl_winding(&field)?;
    Ok(GLRun {
        final_winding,
        trace: WindingTrace {
            seed,
            schedule: *schedule,
            snapshots,
            final_winding,
        },
        final_field: field,
    })
}
