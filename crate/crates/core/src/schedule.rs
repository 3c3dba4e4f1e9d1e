//! Three-phase quench of the transverse trap frequency: hold at `nu_start`
//! while the chain thermalizes, ramp linearly to `nu_end` over `tau_q`, then
//! hold at `nu_end` while the helix relaxes. Times are measured from the start
//! of the trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::critical_frequency;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSchedule {
    pub nu_start: f64,
    pub nu_end: f64,
    pub tau_q: f64,
    pub t_thermalize: f64,
    pub t_relax: f64,
}

pub const DEFAULT_NU_START: f64 = 2.54;
pub const DEFAULT_NU_END: f64 = 1.68;
/// Thermalization and relaxation lengths as step counts at the default
/// timestep.
pub const THERMALIZE_STEPS: u64 = 40_000;
pub const RELAX_STEPS: u64 = 80_000;
pub const DEFAULT_DT: f64 = 0.01;

impl QuenchSchedule {
    /// Schedule with the default endpoints and phase durations.
    pub fn with_tau_q(tau_q: f64) -> Self {
        QuenchSchedule {
            nu_start: DEFAULT_NU_START,
            nu_end: DEFAULT_NU_END,
            tau_q,
            t_thermalize: THERMALIZE_STEPS as f64 * DEFAULT_DT,
            t_relax: RELAX_STEPS as f64 * DEFAULT_DT,
        }
    }

    /// Checks durations and frequencies, but not that the ramp crosses the
    /// critical point; see [`Self::validate_crossing`].
    pub fn validate(&self) -> Result<()> {
        if !(self.nu_start > 0.0 && self.nu_end > 0.0) {
            return Err(Error::Config("trap frequencies must be positive".into()));
        }
        if !(self.tau_q > 0.0) || !self.tau_q.is_finite() {
            return Err(Error::Config(format!("tau_q must be > 0, got {}", self.tau_q)));
        }
        if !(self.t_thermalize >= 0.0 && self.t_relax >= 0.0) {
            return Err(Error::Config("phase durations must be >= 0".into()));
        }
        Ok(())
    }

    /// Requires `nu_start > nu_c > nu_end`.
    pub fn validate_crossing(&self) -> Result<()> {
        self.validate()?;
        let nu_c = critical_frequency();
        if !(self.nu_start > nu_c && nu_c > self.nu_end) {
            return Err(Error::Config(format!(
                "ramp {} -> {} does not cross the critical frequency {nu_c}",
                self.nu_start, self.nu_end
            )));
        }
        Ok(())
    }

    pub fn ramp_start(&self) -> f64 {
        self.t_thermalize
    }

    pub fn ramp_end(&self) -> f64 {
        self.t_thermalize + self.tau_q
    }

    pub fn total_duration(&self) -> f64 {
        self.ramp_end() + self.t_relax
    }

    /// Transverse frequency at time `t`.
    pub fn nu_t(&self, t: f64) -> f64 {
        if t <= self.t_thermalize {
            self.nu_start
        } else if t >= self.ramp_end() {
            self.nu_end
        } else {
            let s = (t - self.t_thermalize) / self.tau_q;
            self.nu_start + s * (self.nu_end - self.nu_start)
        }
    }

    /// `delta(t) = nu_t(t)^2 - nu_c^2`.
    pub fn delta(&self, t: f64) -> f64 {
        let nu = self.nu_t(t);
        let nu_c = critical_frequency();
        nu * nu - nu_c * nu_c
    }

    /// Effective quench amplitude `|2 nu_start (nu_end - nu_start)|`: the
    /// ramp of `nu_t^2` linearized at the start of the ramp.
    pub fn delta0(&self) -> f64 {
        (2.0 * self.nu_start * (self.nu_end - self.nu_start)).abs()
    }

    /// Same linearization taken at the critical point instead,
    /// `|2 nu_c (nu_end - nu_start)|`.
    pub fn delta0_at_critical(&self) -> f64 {
        (2.0 * critical_frequency() * (self.nu_end - self.nu_start)).abs()
    }

    /// Time at which the ramp passes the critical frequency.
    pub fn critical_crossing_time(&self) -> Result<f64> {
        let nu_c = critical_frequency();
        let (hi, lo) = (self.nu_start.max(self.nu_end), self.nu_start.min(self.nu_end));
        if !(lo <= nu_c && nu_c <= hi) || self.nu_start == self.nu_end {
            return Err(Error::Domain(format!(
                "ramp {} -> {} never reaches nu_c = {nu_c}",
                self.nu_start, self.nu_end
            )));
        }
        let s = (self.nu_start - nu_c) / (self.nu_start - self.nu_end);
        Ok(self.t_thermalize + s * self.tau_q)
    }
}
