//! Langevin molecular dynamics of a laser-cooled ion ring driven through the
//! linear-to-zigzag transition, and the statistics of the helices it leaves
//! behind.
//!
//! * [`units`] natural units and the critical trap frequency
//! * [`forces`] periodic Coulomb chain in a transverse harmonic trap
//! * [`integrator`] Langevin impulse integrator
//! * [`schedule`] three-phase quench of the transverse frequency
//! * [`analysis`] order parameter, winding number, phase slips, ensemble
//!   statistics, power-law fit and the Kibble-Zurek estimates
//! * [`gl`] stochastic Ginzburg-Landau field on a periodic grid
//! * [`harness`] configuration, ensembles, persistence and resume

// NaN must fail every positivity check below
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod forces;
pub mod gl;
pub mod harness;
pub mod integrator;
pub mod rng;
pub mod schedule;
pub mod units;

pub use error::{Error, Result};
pub use forces::{ChainState, ForceField};
pub use integrator::{LangevinIntegrator, ThermostatParams};
pub use schedule::QuenchSchedule;
pub use units::{critical_frequency, SimParams};
