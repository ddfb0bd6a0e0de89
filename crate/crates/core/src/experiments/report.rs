//! Sweep reports and their JSON / CSV forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub stat: String,
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Least-squares fit of `ln value = b - c_hat ln p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c_hat: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: String,
    pub rows: Vec<SweepRow>,
    pub fit: Option<DecayFit>,
}

impl SweepReport {
    pub fn new(spec: impl Into<String>) -> Self {
        Self {
            spec: spec.into(),
            rows: Vec::new(),
            fit: None,
        }
    }

    pub fn push(&mut self, p: u64, stat: impl Into<String>, value: f64, trials: u64, seed: u64) {
        self.rows.push(SweepRow {
            p,
            stat: stat.into(),
            value,
            trials,
            seed,
        });
    }

    /// Sorts rows by `p` (stable) and fits the decay of `fit_stat`.
    pub fn finish(mut self, fit_stat: &str) -> Self {
        self.rows.sort_by_key(|r| r.p);
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.stat == fit_stat && r.value > 0.0)
            .map(|r| ((r.p as f64).ln(), r.value.ln()))
            .collect();
        self.fit = fit_decay(&points);
        self
    }

    /// Values of one statistic in row order.
    pub fn series(&self, stat: &str) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.stat == stat)
            .map(|r| (r.p, r.value))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }

    /// Header `p,stat,value,trials,seed` then one line per row.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        writer
            .write_record(["p", "stat", "value", "trials", "seed"])
            .expect("in-memory write");
        for row in &self.rows {
            writer.serialize(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Needs at least three points with distinct abscissae.
pub fn fit_decay(points: &[(f64, f64)]) -> Option<DecayFit> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(DecayFit { c_hat: -slope, r2 })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
