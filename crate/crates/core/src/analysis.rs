//! Order parameter, winding number and the statistics built on them.
//!
//! The discrete order parameter is the *staggered* transverse displacement
//! `A_j = (-1)^j (y_j + i z_j)`. A planar zigzag alternates sign from ion to
//! ion, so without the `(-1)^j` factor it would register a spurious winding
//! of `N/2`; with it, a zigzag in any plane has a constant `A_j` and a helix
//! has a phase that advances uniformly along the ring. Ions keep the labels
//! they had on the initial straight chain (ascending `x`), and
//! [`check_ring_order`] enforces that no ion overtakes another.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::ChainState;
use crate::schedule::QuenchSchedule;

/// Largest tolerated distance of the phase sum from an integer multiple of 2 pi,
/// in units of 2 pi.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// What to do with the phase of an ion sitting exactly on the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeroPhase {
    /// Phase is undefined; winding sums step over the ion.
    #[default]
    Undefined,
    /// Phase is taken to be zero.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSnapshot {
    pub time: f64,
    /// Axial coordinate of each site (ion `x` or grid point).
    pub x: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    /// `arg A_j` in `(-pi, pi]`, `None` where the phase is undefined.
    pub phases: Vec<Option<f64>>,
    pub winding: Option<i64>,
}

impl OrderSnapshot {
    /// Builds a snapshot from site amplitudes, without staggering.
    pub fn from_field(time: f64, x: Vec<f64>, amplitudes: Vec<Complex64>, zero: ZeroPhase) -> Self {
        let phases = amplitudes
            .iter()
            .map(|a| {
                if a.norm_sqr() > 0.0 {
                    Some(canonical_angle(a.im.atan2(a.re)))
                } else {
                    match zero {
                        ZeroPhase::Undefined => None,
                        ZeroPhase::Zero => Some(0.0),
                    }
                }
            })
            .collect();
        OrderSnapshot {
            time,
            x,
            amplitudes,
            phases,
            winding: None,
        }
    }

    pub fn abs(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|a| a.norm())
    }

    pub fn mean_abs(&self) -> f64 {
        if self.amplitudes.is_empty() {
            return 0.0;
        }
        self.abs().sum::<f64>() / self.amplitudes.len() as f64
    }

    /// Fills in `winding` and returns it.
    pub fn with_winding(mut self) -> Result<Self> {
        self.winding = Some(winding_number(&self)?);
        Ok(self)
    }
}

/// atan2 returns -pi for (negative, -0.0); map it to +pi.
fn canonical_angle(t: f64) -> f64 {
    if t <= -PI {
        t + TAU
    } else {
        t
    }
}

/// Wraps an angle difference into `(-pi, pi]`; an exact `-pi` becomes `+pi`.
pub fn wrap_phase(d: f64) -> f64 {
    let mut w = d - TAU * (d / TAU).round();
    if w <= -PI {
        w += TAU;
    } else if w > PI {
        w -= TAU;
    }
    w
}

/// Staggered order parameter of the chain.
pub fn order_parameter(state: &ChainState) -> OrderSnapshot {
    order_parameter_with(state, ZeroPhase::Undefined)
}

pub fn order_parameter_with(state: &ChainState, zero: ZeroPhase) -> OrderSnapshot {
    let amplitudes = state
        .positions
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let a = Complex64::new(r[1], r[2]);
            if j % 2 == 0 {
                a
            } else {
                -a
            }
        })
        .collect();
    let x = state.positions.iter().map(|r| r[0]).collect();
    OrderSnapshot::from_field(state.time, x, amplitudes, zero)
}

/// Net number of 2 pi turns of a closed sequence of phases; undefined phases
/// are skipped and the difference is taken between their defined neighbours.
pub fn winding_of_phases(phases: &[Option<f64>]) -> Result<i64> {
    let defined: Vec<f64> = phases.iter().flatten().copied().collect();
    if defined.len() < 2 {
        return Ok(0);
    }
    let mut total = 0.0;
    for k in 0..defined.len() {
        let next = defined[(k + 1) % defined.len()];
        total += wrap_phase(next - defined[k]);
    }
    let turns = total / TAU;
    let w = turns.round();
    let residual = turns - w;
    if residual.abs() >= INTEGRALITY_TOLERANCE {
        return Err(Error::Integrality { residual });
    }
    Ok(w as i64)
}

/// `W = (1/2pi) sum_j wrap(theta_{j+1} - theta_j)` around the ring.
pub fn winding_number(snapshot: &OrderSnapshot) -> Result<i64> {
    winding_of_phases(&snapshot.phases)
}

/// Fails if any ion has overtaken a neighbour along the ring, i.e. if the
/// labels are no longer in cyclic ascending-`x` order.
pub fn check_ring_order(state: &ChainState) -> Result<()> {
    let n = state.len();
    if n < 3 {
        return Ok(());
    }
    let c = state.box_length;
    let mut total = 0.0;
    let mut worst = (0.0, 0);
    for j in 0..n {
        let gap = (state.positions[(j + 1) % n][0] - state.positions[j][0]).rem_euclid(c);
        if gap == 0.0 {
            return Err(Error::OrderViolation {
                time: state.time,
                ion: j,
            });
        }
        if gap > worst.0 {
            worst = (gap, j);
        }
        total += gap;
    }
    // in cyclic order the gaps tile the ring exactly once
    if (total - c).abs() > 1e-6 * c {
        return Err(Error::OrderViolation {
            time: state.time,
            ion: worst.1,
        });
    }
    Ok(())
}

/// Sampled history of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingTrace {
    pub seed: u64,
    pub schedule: QuenchSchedule,
    pub snapshots: Vec<OrderSnapshot>,
    pub final_winding: i64,
}

impl WindingTrace {
    pub fn is_time_ordered(&self) -> bool {
        self.snapshots.windows(2).all(|w| w[0].time < w[1].time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSlip {
    pub time: f64,
    pub ion: usize,
}

/// Localized zeros of the order parameter after symmetry breaking: sites
/// with `|A_j| < threshold` in snapshots whose chain-averaged `|A|` exceeds
/// `3 * threshold`. A site flagged in consecutive snapshots is one event,
/// reported at its first detection.
pub fn phase_slip_events(trace: &WindingTrace, amplitude_threshold: f64) -> Vec<PhaseSlip> {
    let mut events = Vec::new();
    let mut last_seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, snap) in trace.snapshots.iter().enumerate() {
        if snap.mean_abs() <= 3.0 * amplitude_threshold {
            continue;
        }
        for (j, a) in snap.abs().enumerate() {
            if a >= amplitude_threshold {
                continue;
            }
            let merged = matches!(last_seen.get(&j), Some(&prev) if prev + 1 == k);
            last_seen.insert(j, k);
            if !merged {
                events.push(PhaseSlip {
                    time: snap.time,
                    ion: j,
                });
            }
        }
    }
    events
}

/// Default slip threshold: 10% of the mean zigzag amplitude of the last
/// snapshot (the relaxed chain).
pub fn default_slip_threshold(trace: &WindingTrace) -> f64 {
    trace
        .snapshots
        .last()
        .map(|s| 0.1 * s.mean_abs())
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n: usize,
    pub mean: f64,
    pub mean_abs_w: f64,
    /// Standard error of `mean_abs_w`.
    pub mean_abs_stderr: f64,
    /// Population standard deviation of `W`.
    pub sigma_w: f64,
    pub skewness: f64,
    pub histogram: BTreeMap<i64, usize>,
}

pub fn ensemble_stats(windings: &[i64]) -> Result<EnsembleStats> {
    if windings.is_empty() {
        return Err(Error::Domain("ensemble statistics need at least one sample".into()));
    }
    let n = windings.len() as f64;
    let mean = windings.iter().map(|&w| w as f64).sum::<f64>() / n;
    let mean_abs = windings.iter().map(|&w| (w as f64).abs()).sum::<f64>() / n;
    let (mut m2, mut m3, mut abs_var) = (0.0, 0.0, 0.0);
    for &w in windings {
        let d = w as f64 - mean;
        m2 += d * d;
        m3 += d * d * d;
        let da = (w as f64).abs() - mean_abs;
        abs_var += da * da;
    }
    m2 /= n;
    m3 /= n;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let mut histogram = BTreeMap::new();
    for &w in windings {
        *histogram.entry(w).or_insert(0) += 1;
    }
    let mean_abs_stderr = if windings.len() > 1 {
        (abs_var / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(EnsembleStats {
        n: windings.len(),
        mean,
        mean_abs_w: mean_abs,
        mean_abs_stderr,
        sigma_w: m2.sqrt(),
        skewness,
        histogram,
    })
}

/// Ensemble statistics at one quench time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub tau_q: f64,
    pub stats: EnsembleStats,
}

impl RateRecord {
    /// `ln(1 / (omega_0 tau_q))`
    pub fn ln_inv_rate(&self) -> f64 {
        -self.tau_q.ln()
    }
}

/// Range of `ln(1/tau_q)` used by the power-law fit: `min <= x < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateWindow {
    pub min_ln_rate: f64,
    pub max_ln_rate: f64,
}

impl Default for RateWindow {
    /// Slow to moderate quenches, `ln(1/tau_q) < -4`.
    fn default() -> Self {
        RateWindow {
            min_ln_rate: f64::NEG_INFINITY,
            max_ln_rate: -4.0,
        }
    }
}

impl RateWindow {
    pub fn below(max_ln_rate: f64) -> Self {
        RateWindow {
            min_ln_rate: f64::NEG_INFINITY,
            max_ln_rate,
        }
    }

    pub fn contains(&self, ln_rate: f64) -> bool {
        ln_rate >= self.min_ln_rate && ln_rate < self.max_ln_rate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Slope of `ln<|W|>` against `ln(1/tau_q)`.
    pub exponent: f64,
    pub intercept: f64,
    /// `exp(intercept)`: `<|W|> = prefactor * (1/tau_q)^exponent`.
    pub prefactor: f64,
    /// Pearson correlation of the log-log points (1 for a perfect fit).
    pub regression_coefficient: f64,
    pub n_points: usize,
    pub window: RateWindow,
}

impl PowerLawFit {
    pub fn predict(&self, tau_q: f64) -> f64 {
        self.prefactor * (1.0 / tau_q).powf(self.exponent)
    }
}

/// Least-squares line through `(ln(1/tau_q), ln<|W|>)` for the records inside
/// `window` that have a nonzero mean.
pub fn fit_power_law(records: &[RateRecord], window: RateWindow) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| window.contains(r.ln_inv_rate()) && r.stats.mean_abs_w > 0.0)
        .map(|r| (r.ln_inv_rate(), r.stats.mean_abs_w.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 usable rates, found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("all fitted rates coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r = if ss_res <= 1e-24 * n {
        1.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(PowerLawFit {
        exponent: slope,
        intercept,
        prefactor: intercept.exp(),
        regression_coefficient: r,
        n_points: pts.len(),
        window,
    })
}

/// Per-rate statistics together with the fitted power law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub records: Vec<RateRecord>,
    pub fit: Option<PowerLawFit>,
}

/// Kibble-Zurek estimate `<|W|> = sqrt(N / 6 pi) (eta delta0 / tau_q)^(1/8)`
/// in natural units (`omega_0 = 1`). `n_ions` is real so that non-integer
/// chain lengths can be probed.
pub fn kzm_predicted_mean_abs_w(n_ions: f64, eta: f64, delta0: f64, tau_q: f64) -> f64 {
    (n_ions / (6.0 * PI)).sqrt() * (eta * delta0 / tau_q).powf(0.125)
}

/// Freeze-out instant and the correlation length locked in there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreezeOut {
    pub t_hat: f64,
    /// Control parameter at freeze-out, `delta0 t_hat / tau_q`.
    pub delta_hat: f64,
    pub xi_hat: f64,
}

/// Overdamped mean-field freeze-out: relaxation time `eta / delta` matched to
/// the time to the transition under `delta(t) = delta0 t / tau_q`, giving
/// `t_hat = sqrt(eta tau_q / delta0)` and `xi_hat = 1 / sqrt(delta(t_hat))`.
pub fn kzm_freeze_out(eta: f64, delta0: f64, tau_q: f64) -> FreezeOut {
    let t_hat = (eta * tau_q / delta0).sqrt();
    let delta_hat = delta0 * t_hat / tau_q;
    FreezeOut {
        t_hat,
        delta_hat,
        xi_hat: 1.0 / delta_hat.sqrt(),
    }
}

/// `sigma(W)` for a ring of length `c` split into `c / xi` domains with
/// independent uniform phases: `(1/2pi) sqrt(pi^2 c / (3 xi))`.
pub fn sigma_w_from_domains(box_length: f64, xi_hat: f64) -> f64 {
    (PI * PI * box_length / (3.0 * xi_hat)).sqrt() / TAU
}

/// `<|W|>` of a zero-mean Gaussian with standard deviation `sigma`.
pub fn half_normal_mean(sigma: f64) -> f64 {
    sigma * (2.0 / PI).sqrt()
}
