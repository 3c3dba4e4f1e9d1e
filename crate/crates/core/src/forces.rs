//! Potential energy and forces of ions on a ring with a transverse harmonic trap.
//!
//! The ring is unrolled into a box of length `C = N a` that is periodic along
//! `x`; pairs interact through the bare Coulomb potential evaluated with the
//! minimal-image separation in `x`. Transverse coordinates are never wrapped.
//! Pair sums are direct and O(N^2), accumulated in a fixed `(i < j)` order so a
//! force evaluation is bitwise reproducible.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Microscopic state of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub time: f64,
    pub box_length: f64,
    /// `x` is kept wrapped into `[0, box_length)`.
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
}

impl ChainState {
    /// `n` ions equally spaced on the axis with unit spacing, at rest.
    pub fn equally_spaced(n: usize) -> Self {
        let positions = (0..n).map(|j| [j as f64, 0.0, 0.0]).collect();
        ChainState {
            time: 0.0,
            box_length: n as f64,
            positions,
            velocities: vec![[0.0; 3]; n],
        }
    }

    pub fn from_positions(box_length: f64, positions: Vec<Vec3>) -> Self {
        let n = positions.len();
        let mut state = ChainState {
            time: 0.0,
            box_length,
            positions,
            velocities: vec![[0.0; 3]; n],
        };
        state.wrap();
        state
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Re-wraps every `x` into `[0, box_length)`.
    pub fn wrap(&mut self) {
        let c = self.box_length;
        for r in &mut self.positions {
            if r[0] < 0.0 || r[0] >= c {
                r[0] = r[0].rem_euclid(c);
                // rem_euclid can round up to exactly c
                if r[0] >= c {
                    r[0] = 0.0;
                }
            }
        }
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self
            .velocities
            .iter()
            .map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            .sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.positions
            .iter()
            .chain(self.velocities.iter())
            .all(|r| r.iter().all(|c| c.is_finite()))
    }
}

/// Transverse trap plus periodic Coulomb interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceField {
    /// Transverse trap frequency (omega_0).
    pub nu_t: f64,
    pub box_length: f64,
}

impl ForceField {
    pub fn new(nu_t: f64, box_length: f64) -> Result<Self> {
        if !(nu_t > 0.0) {
            return Err(Error::Domain(format!("nu_t must be positive, got {nu_t}")));
        }
        if !(box_length > 0.0) {
            return Err(Error::Domain(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(ForceField { nu_t, box_length })
    }
}

#[inline(always)]
fn minimal_image(dx: f64, box_length: f64) -> f64 {
    let half = 0.5 * box_length;
    if dx > half {
        if dx - box_length >= -half {
            return dx - box_length;
        }
    } else if dx < -half {
        if dx + box_length <= half {
            return dx + box_length;
        }
    } else {
        return dx;
    }
    dx - box_length * (dx / box_length).round()
}

/// Minimal-image separation vector `r_j - r_i`.
#[inline(always)]
fn separation(ri: &Vec3, rj: &Vec3, box_length: f64) -> Vec3 {
    [
        minimal_image(rj[0] - ri[0], box_length),
        rj[1] - ri[1],
        rj[2] - ri[2],
    ]
}

/// Distance between two ions under the minimal-image convention along `x`.
pub fn pair_distance(ri: &Vec3, rj: &Vec3, box_length: f64) -> Result<f64> {
    if !(box_length > 0.0) {
        return Err(Error::Domain(format!(
            "box length must be positive, got {box_length}"
        )));
    }
    let d = separation(ri, rj, box_length);
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return Err(Error::Singularity { i: 0, j: 1 });
    }
    Ok(r)
}

/// `V = 1/2 nu_t^2 sum (y^2 + z^2) + sum_{pairs} 1/|r_i - r_j|`.
pub fn potential_energy(state: &ChainState, field: &ForceField) -> Result<f64> {
    let c = field.box_length;
    let nu2 = field.nu_t * field.nu_t;
    let pos = &state.positions;
    let mut trap = 0.0;
    for r in pos {
        trap += r[1] * r[1] + r[2] * r[2];
    }
    let mut coulomb = 0.0;
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            let d = separation(&pos[i], &pos[j], c);
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if r2 == 0.0 {
                return Err(Error::Singularity { i, j });
            }
            coulomb += 1.0 / r2.sqrt();
        }
    }
    Ok(0.5 * nu2 * trap + coulomb)
}

/// Writes the Coulomb part of `-grad V` for every ion into `out`.
pub fn coulomb_forces(positions: &[Vec3], box_length: f64, out: &mut [Vec3]) -> Result<()> {
    let n = positions.len();
    assert_eq!(out.len(), n, "force buffer length mismatch");
    let c = box_length;
    let half = 0.5 * c;
    out.iter_mut().for_each(|f| *f = [0.0; 3]);
    for i in 0..n {
        let ri = positions[i];
        let mut fi = [0.0; 3];
        for j in (i + 1)..n {
            let d = separation(&ri, &positions[j], c);
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if r2 == 0.0 {
                return Err(Error::Singularity { i, j });
            }
            let inv_r = 1.0 / r2.sqrt();
            let s = inv_r * inv_r * inv_r;
            // force on j is +d/r^3, on i the opposite; an exactly antipodal
            // pair has two nearest images and no net axial force
            let fx = if d[0].abs() == half { 0.0 } else { d[0] * s };
            let fy = d[1] * s;
            let fz = d[2] * s;
            fi[0] -= fx;
            fi[1] -= fy;
            fi[2] -= fz;
            let fj = &mut out[j];
            fj[0] += fx;
            fj[1] += fy;
            fj[2] += fz;
        }
        let f = &mut out[i];
        f[0] += fi[0];
        f[1] += fi[1];
        f[2] += fi[2];
    }
    Ok(())
}

/// Writes `-grad V` for every ion into `out`.
pub fn compute_forces(state: &ChainState, field: &ForceField, out: &mut [Vec3]) -> Result<()> {
    coulomb_forces(&state.positions, field.box_length, out)?;
    let nu2 = field.nu_t * field.nu_t;
    for (f, r) in out.iter_mut().zip(&state.positions) {
        f[1] -= nu2 * r[1];
        f[2] -= nu2 * r[2];
    }
    Ok(())
}

/// Allocating wrapper around [`compute_forces`].
pub fn total_forces(state: &ChainState, field: &ForceField) -> Result<Vec<Vec3>> {
    let mut out = vec![[0.0; 3]; state.len()];
    compute_forces(state, field, &mut out)?;
    Ok(out)
}

/// Hessian of `V` restricted to the `y` coordinates, for a straight chain of
/// `n` equally spaced ions on a ring of length `n`. The `z` block is identical
/// and the two decouple from each other and from `x`.
pub fn linear_chain_transverse_hessian(n: usize, nu_t: f64) -> DMatrix<f64> {
    let c = n as f64;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = nu_t * nu_t;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = minimal_image(j as f64 - i as f64, c).abs();
            let k = 1.0 / (d * d * d);
            h[(i, j)] = k;
            diag -= k;
        }
        h[(i, i)] = diag;
    }
    h
}

pub fn min_transverse_eigenvalue(n: usize, nu_t: f64) -> f64 {
    let eig = SymmetricEigen::new(linear_chain_transverse_hessian(n, nu_t));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Transverse frequency at which the straight `n`-ion ring loses stability,
/// located by bisection on the sign of the smallest transverse Hessian
/// eigenvalue.
pub fn linear_chain_instability_frequency(n: usize, tol: f64) -> f64 {
    let (mut lo, mut hi) = (0.5, 5.0);
    debug_assert!(min_transverse_eigenvalue(n, lo) < 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_transverse_eigenvalue(n, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
