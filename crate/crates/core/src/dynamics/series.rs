use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled real observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("a time series needs at least two samples"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!("sample spacing must be positive, got {dt}")));
        }
        Ok(Self {
            label: label.into(),
            t0,
            dt,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Two-column `t,value` text with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("t,{}\n", self.label);
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.time(k), v));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Writes `metadata` as pretty JSON next to a CSV file.
    pub fn write_sidecar(path: &Path, metadata: &serde_json::Value) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(metadata)?)?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::domain("empty CSV"))?;
        let label = header
            .split_once(',')
            .map(|(_, l)| l.to_string())
            .ok_or_else(|| Error::domain("CSV header must have two columns"))?;
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (n, line) in lines.enumerate() {
            let parse = |s: Option<&str>| {
                s.and_then(|x| x.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::domain(format!("bad CSV row {}", n + 2)))
            };
            let mut cols = line.split(',');
            ts.push(parse(cols.next())?);
            vs.push(parse(cols.next())?);
        }
        if ts.len() < 2 {
            return Err(Error::domain("a time series needs at least two samples"));
        }
        let dt = ts[1] - ts[0];
        Self::new(label, ts[0], dt, vs)
    }
}
