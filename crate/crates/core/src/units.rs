//! Natural units of the ion ring and the structural critical point.
//!
//! Everything in the crate works in units where the ion mass, the Coulomb
//! coupling `e^2 / 4 pi eps0` and the lattice spacing are all one, so the
//! characteristic frequency `omega_0` is one as well. Times are in `1/omega_0`,
//! lengths in `a`, energies in `m omega_0^2 a^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Apery's constant, zeta(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Base quantities of the unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalUnits {
    pub mass: f64,
    pub charge_coupling: f64,
    pub spacing: f64,
}

impl Default for NaturalUnits {
    fn default() -> Self {
        NaturalUnits {
            mass: 1.0,
            charge_coupling: 1.0,
            spacing: 1.0,
        }
    }
}

impl NaturalUnits {
    pub fn omega0(&self) -> Result<f64> {
        characteristic_frequency(self.mass, self.charge_coupling, self.spacing)
    }
}

/// `omega_0 = sqrt(e^2 / (4 pi eps0 m a^3))`, obtained by balancing the
/// Coulomb energy against a harmonic trap energy over one spacing.
pub fn characteristic_frequency(mass: f64, charge_coupling: f64, spacing: f64) -> Result<f64> {
    for (name, v) in [
        ("mass", mass),
        ("charge_coupling", charge_coupling),
        ("spacing", spacing),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok((charge_coupling / (mass * spacing.powi(3))).sqrt())
}

/// zeta(3) from the central-binomial series
/// `zeta(3) = 5/2 sum_{n>=1} (-1)^{n+1} / (n^3 C(2n, n))`,
/// which gains about 0.6 digits per term.
pub fn zeta3() -> f64 {
    let mut sum = 0.0;
    let mut central = 1.0; // C(2n, n), updated in place
    for n in 1..=40u32 {
        let nf = f64::from(n);
        central *= (2.0 * nf - 1.0) * 2.0 / nf;
        let term = 1.0 / (nf * nf * nf * central);
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    2.5 * sum
}

/// Transverse trap frequency below which the straight chain is unstable:
/// `nu_c = sqrt(7 zeta(3) / 2)` in units of `omega_0`.
pub fn critical_frequency() -> f64 {
    (3.5 * zeta3()).sqrt()
}

/// Physical and numerical parameters of one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    pub n_ions: usize,
    /// Friction rate (omega_0).
    pub eta: f64,
    /// Thermal energy (m omega_0^2 a^2).
    pub kt: f64,
    /// Timestep (1/omega_0).
    pub dt: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_ions: 400,
            eta: 4.38,
            kt: 3.5,
            dt: 0.01,
            seed: 0,
        }
    }
}

impl SimParams {
    /// Checks the parameter invariants. `nu_max` is the largest transverse
    /// frequency the run will use; it enters the timestep stability guard.
    pub fn validate(&self, nu_max: f64) -> Result<()> {
        if self.n_ions < 2 || !self.n_ions.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_ions must be a positive even number, got {}",
                self.n_ions
            )));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(self.kt >= 0.0) || !self.kt.is_finite() {
            return Err(Error::Config(format!("kt must be >= 0, got {}", self.kt)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        let stiff = nu_max.max(self.eta);
        if self.dt * stiff >= 0.5 {
            return Err(Error::Config(format!(
                "dt * max(nu_t, eta) = {} violates the stability guard (< 0.5)",
                self.dt * stiff
            )));
        }
        Ok(())
    }

    /// Ring circumference in units of the spacing.
    pub fn box_length(&self) -> f64 {
        self.n_ions as f64
    }
}
