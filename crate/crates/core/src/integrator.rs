//! Langevin impulse integrator.
//!
//! One step is a symmetric splitting: a half kick with the deterministic
//! force, an exact free-Langevin flight over `dt` (velocities follow an
//! Ornstein-Uhlenbeck process and positions integrate it, with correctly
//! correlated Gaussian increments), and a second half kick. With `eta = 0`
//! the flight is a plain drift and the scheme is velocity Verlet.
//!
//! The Coulomb force is cached between steps; the trap part is added on the
//! fly so the trap frequency may change from one step to the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{coulomb_forces, ChainState, ForceField, Vec3};
use crate::rng::NoiseStream;

/// Laser-cooling friction and temperature. Mass is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermostatParams {
    pub eta: f64,
    pub kt: f64,
}

/// Coefficients of the exact free-Langevin flight over one timestep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightCoefficients {
    /// `exp(-eta dt)`
    pub decay: f64,
    /// `(1 - exp(-eta dt)) / eta`, the drift multiplying the initial velocity.
    pub drift: f64,
    /// Standard deviation of the velocity increment.
    pub sigma_v: f64,
    /// Position noise = `x_from_v * z1 + sigma_x_cond * z2`.
    pub x_from_v: f64,
    pub sigma_x_cond: f64,
}

impl FlightCoefficients {
    pub fn new(thermostat: ThermostatParams, dt: f64) -> Self {
        let ThermostatParams { eta, kt } = thermostat;
        let u = eta * dt;
        if u == 0.0 {
            return FlightCoefficients {
                decay: 1.0,
                drift: dt,
                sigma_v: 0.0,
                x_from_v: 0.0,
                sigma_x_cond: 0.0,
            };
        }
        let one_minus_decay = -(-u).exp_m1();
        let decay = 1.0 - one_minus_decay;
        let drift = one_minus_decay / eta;
        let var_v = kt * one_minus_decay * (1.0 + decay);
        // kt/eta^2 * (2u - 3 + 4e^{-u} - e^{-2u}); series below u = 1e-3
        let bracket = if u < 1e-3 {
            u * u * u * (2.0 / 3.0 - u * (0.5 - u * 7.0 / 30.0))
        } else {
            2.0 * u - 3.0 + 4.0 * decay - decay * decay
        };
        let var_x = kt / (eta * eta) * bracket;
        let cov = kt / eta * one_minus_decay * one_minus_decay;
        let sigma_v = var_v.sqrt();
        let (x_from_v, cond) = if var_v > 0.0 {
            (cov / sigma_v, (var_x - cov * cov / var_v).max(0.0))
        } else {
            (0.0, 0.0)
        };
        FlightCoefficients {
            decay,
            drift,
            sigma_v,
            x_from_v,
            sigma_x_cond: cond.sqrt(),
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.sigma_v > 0.0 || self.sigma_x_cond > 0.0
    }
}

/// Integrator state for one trajectory: noise stream, step counter and the
/// cached Coulomb forces of the current positions.
#[derive(Debug, Clone)]
pub struct LangevinIntegrator {
    thermostat: ThermostatParams,
    dt: f64,
    flight: FlightCoefficients,
    noise: NoiseStream,
    step_index: u64,
    coulomb: Vec<Vec3>,
    coulomb_valid: bool,
}

impl LangevinIntegrator {
    pub fn new(thermostat: ThermostatParams, dt: f64, seed: u64) -> Self {
        LangevinIntegrator {
            thermostat,
            dt,
            flight: FlightCoefficients::new(thermostat, dt),
            noise: NoiseStream::new(seed),
            step_index: 0,
            coulomb: Vec::new(),
            coulomb_valid: false,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn thermostat(&self) -> ThermostatParams {
        self.thermostat
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Must be called if the state is modified outside of [`Self::step`].
    pub fn invalidate(&mut self) {
        self.coulomb_valid = false;
    }

    fn refresh(&mut self, state: &ChainState) -> Result<()> {
        if !self.coulomb_valid || self.coulomb.len() != state.len() {
            self.coulomb.resize(state.len(), [0.0; 3]);
            coulomb_forces(&state.positions, state.box_length, &mut self.coulomb)?;
            self.coulomb_valid = true;
        }
        Ok(())
    }

    fn half_kick(&self, state: &mut ChainState, nu_t: f64) {
        let h = 0.5 * self.dt;
        let nu2 = nu_t * nu_t;
        for ((v, r), fc) in state
            .velocities
            .iter_mut()
            .zip(&state.positions)
            .zip(&self.coulomb)
        {
            v[0] += h * fc[0];
            v[1] += h * (fc[1] - nu2 * r[1]);
            v[2] += h * (fc[2] - nu2 * r[2]);
        }
    }

    fn flight(&mut self, state: &mut ChainState) {
        let fc = self.flight;
        if fc.is_noisy() {
            self.noise.seek(self.step_index, 3 * state.len() as u64);
            for (r, v) in state.positions.iter_mut().zip(state.velocities.iter_mut()) {
                for c in 0..3 {
                    let (z1, z2) = self.noise.normal_pair();
                    let v0 = v[c];
                    v[c] = fc.decay * v0 + fc.sigma_v * z1;
                    r[c] += fc.drift * v0 + fc.x_from_v * z1 + fc.sigma_x_cond * z2;
                }
            }
        } else {
            for (r, v) in state.positions.iter_mut().zip(state.velocities.iter_mut()) {
                for c in 0..3 {
                    let v0 = v[c];
                    v[c] = fc.decay * v0;
                    r[c] += fc.drift * v0;
                }
            }
        }
        state.wrap();
    }

    /// Advances `state` by one timestep. The trap frequency may differ at the
    /// two half kicks (`nu_start` at the beginning, `nu_end` at the end of the
    /// step), which is how a time-dependent schedule is followed.
    pub fn step_ramped(&mut self, state: &mut ChainState, nu_start: f64, nu_end: f64) -> Result<()> {
        self.refresh(state)?;
        self.half_kick(state, nu_start);
        self.flight(state);
        self.coulomb_valid = false;
        self.refresh(state)?;
        self.half_kick(state, nu_end);
        state.time += self.dt;
        self.step_index += 1;
        if !state.is_finite() {
            return Err(Error::Blowup {
                step: self.step_index,
            });
        }
        Ok(())
    }

    pub fn step(&mut self, state: &mut ChainState, field: &ForceField) -> Result<()> {
        self.step_ramped(state, field.nu_t, field.nu_t)
    }

    /// Runs `n_steps` steps at fixed trap frequency and returns the kinetic
    /// energy after each step.
    pub fn thermalize(
        &mut self,
        state: &mut ChainState,
        field: &ForceField,
        n_steps: u64,
    ) -> Result<Vec<f64>> {
        let mut ke = Vec::with_capacity(n_steps as usize);
        for _ in 0..n_steps {
            self.step(state, field)?;
            ke.push(state.kinetic_energy());
        }
        Ok(ke)
    }
}

/// One step of a fresh integrator; mostly useful for tests and examples.
pub fn step(
    state: &mut ChainState,
    field: &ForceField,
    thermostat: ThermostatParams,
    dt: f64,
    seed: u64,
) -> Result<()> {
    LangevinIntegrator::new(thermostat, dt, seed).step(state, field)
}
