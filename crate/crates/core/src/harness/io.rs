//! On-disk formats: results table, histograms and trace CSVs.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::analysis::{kzm_predicted_mean_abs_w, OrderSnapshot, ScalingResult};
use crate::error::{Error, Result};

/// Writes through a temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Serde(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))
}

/// Column header of the results table.
pub const RESULTS_HEADER: [&str; 8] = [
    "tau_Q",
    "ln_inv_rate",
    "n_runs",
    "mean_abs_W",
    "sigma_W",
    "skewness",
    "kzm_prediction",
    "ratio_kzm_to_observed",
];

/// Inputs of the Kibble-Zurek estimate for the results table.
#[derive(Debug, Clone, Copy)]
pub struct KzmInputs {
    pub chain_length: f64,
    pub eta: f64,
    pub delta0: f64,
}

impl KzmInputs {
    pub fn predict(&self, tau_q: f64) -> f64 {
        kzm_predicted_mean_abs_w(self.chain_length, self.eta, self.delta0, tau_q)
    }
}

/// One row per rate, in the order of the records.
pub fn results_csv(scaling: &ScalingResult, kzm: KzmInputs) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for rec in &scaling.records {
        let pred = kzm.predict(rec.tau_q);
        let ratio = pred / rec.stats.mean_abs_w;
        w.write_record([
            rec.tau_q.to_string(),
            rec.ln_inv_rate().to_string(),
            rec.stats.n.to_string(),
            rec.stats.mean_abs_w.to_string(),
            rec.stats.sigma_w.to_string(),
            rec.stats.skewness.to_string(),
            pred.to_string(),
            ratio.to_string(),
        ])?;
    }
    w.into_inner()
        .map_err(|e| Error::Serde(e.to_string()))
}

/// Long format: `tau_Q, W, count, fraction`.
pub fn histograms_csv(scaling: &ScalingResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tau_Q", "W", "count", "fraction"])?;
    for rec in &scaling.records {
        for (wind, count) in &rec.stats.histogram {
            let frac = *count as f64 / rec.stats.n as f64;
            w.write_record([rec.tau_q.to_string(), wind.to_string(), count.to_string(), frac.to_string()])?;
        }
    }
    w.into_inner()
        .map_err(|e| Error::Serde(e.to_string()))
}

/// A parsed row of the results table.
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct ResultsRow {
    #[serde(rename = "tau_Q")]
    pub tau_q: f64,
    pub ln_inv_rate: f64,
    pub n_runs: usize,
    #[serde(rename = "mean_abs_W")]
    pub mean_abs_w: f64,
    #[serde(rename = "sigma_W")]
    pub sigma_w: f64,
    pub skewness: f64,
    pub kzm_prediction: f64,
    pub ratio_kzm_to_observed: f64,
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultsRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultsRow>, _>>()?;
    Ok(rows)
}

/// Spacetime trace: one row per site per snapshot. `index_label` is
/// `ion_index` for chains and `grid_index` for fields. Undefined phases are
/// written as `NaN`.
pub fn trace_csv(snapshots: &[OrderSnapshot], index_label: &str) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time", index_label, "x", "absA", "theta", "W"])?;
    for snap in snapshots {
        let wind = snap.winding.map(|w| w.to_string()).unwrap_or_default();
        for (j, (a, th)) in snap.amplitudes.iter().zip(&snap.phases).enumerate() {
            let x = snap.x.get(j).copied().unwrap_or(f64::NAN);
            w.write_record([
                snap.time.to_string(),
                j.to_string(),
                x.to_string(),
                a.norm().to_string(),
                th.unwrap_or(f64::NAN).to_string(),
                wind.clone(),
            ])?;
        }
    }
    w.into_inner()
        .map_err(|e| Error::Serde(e.to_string()))
}
