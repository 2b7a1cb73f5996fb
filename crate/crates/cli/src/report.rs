use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use icebox_core::dynamics::TimeSeries;
use icebox_core::hamiltonian::OperatorSpec;
use icebox_core::StateVector;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Context};

/// Drift bound every propagation must respect.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// Conservation checks collected from every propagated state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    /// Number of propagated trajectories that fed the audit.
    pub trajectories: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl Audit {
    pub fn record(&mut self, op: &OperatorSpec, e0: f64, state: &StateVector) -> icebox_core::Result<()> {
        self.max_norm_drift = self.max_norm_drift.max((state.norm() - 1.0).abs());
        self.max_energy_drift = self.max_energy_drift.max((op.expectation(state)? - e0).abs());
        Ok(())
    }

    fn finish(&mut self) {
        self.tolerance = AUDIT_TOLERANCE;
        self.passed = self.max_norm_drift <= AUDIT_TOLERANCE && self.max_energy_drift <= AUDIT_TOLERANCE;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub wall_seconds: f64,
    /// Seconds spent per computational kernel.
    pub kernels: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: String,
    pub status: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub manifest: Vec<ManifestEntry>,
    pub timings: Timings,
    pub audit: Audit,
    /// Experiment-specific results.
    pub summary: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn read(dir: &Path) -> Result<Self, CliError> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join("report.json"))?)?)
    }
}

/// Output directory, audit and timers shared by one run.
pub struct Run {
    pub dir: PathBuf,
    /// Written next to every CSV.
    pub metadata: serde_json::Value,
    pub audit: Audit,
    pub summary: serde_json::Map<String, serde_json::Value>,
    files: Vec<String>,
    kernels: BTreeMap<String, f64>,
    started: Instant,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Run {
    pub fn new(dir: PathBuf, metadata: serde_json::Value) -> Result<Self, CliError> {
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            metadata,
            audit: Audit::default(),
            summary: serde_json::Map::new(),
            files: Vec::new(),
            kernels: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    /// Runs `f` and charges its wall time to `kernel`.
    pub fn time<T>(&mut self, kernel: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let t = Instant::now();
        let out = f(self);
        *self.kernels.entry(kernel.to_string()).or_default() += t.elapsed().as_secs_f64();
        out
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.summary.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    fn sidecar(&mut self, csv: &str, extra: Option<serde_json::Value>) -> Result<(), CliError> {
        let mut meta = self.metadata.clone();
        if let (Some(obj), Some(extra)) = (meta.as_object_mut(), extra) {
            obj.insert("data".into(), extra);
        }
        let name = format!("{}.meta.json", csv.trim_end_matches(".csv"));
        TimeSeries::write_sidecar(&self.dir.join(&name), &meta).context("writing sidecar")?;
        self.files.push(name);
        Ok(())
    }

    pub fn write_series(&mut self, name: &str, series: &TimeSeries, extra: Option<serde_json::Value>) -> Result<(), CliError> {
        series.write_csv(&self.dir.join(name)).context(format!("writing {name}"))?;
        self.files.push(name.to_string());
        self.sidecar(name, extra)
    }

    /// Numeric table with 17 significant digits per value.
    pub fn write_table(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<f64>],
        extra: Option<serde_json::Value>,
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| num(*v)))?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        self.sidecar(name, extra)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        fs::write(self.dir.join(name), serde_json::to_string_pretty(value)?)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn add_file(&mut self, name: String) {
        self.files.push(name);
    }

    /// Writes `report.json`; the manifest lists only files that exist.
    pub fn finish(
        mut self,
        experiment: &str,
        seed: u64,
        config: serde_json::Value,
        error: Option<&CliError>,
    ) -> Result<RunReport, CliError> {
        self.audit.finish();
        let mut manifest = Vec::new();
        for file in &self.files {
            let path = self.dir.join(file);
            match fs::metadata(&path) {
                Ok(m) => manifest.push(ManifestEntry {
                    file: file.clone(),
                    bytes: m.len(),
                }),
                Err(_) if error.is_some() => {}
                Err(e) => return Err(CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
            }
        }
        let status = if error.is_none() && self.audit.passed { "ok" } else { "failed" };
        let audit_error = (!self.audit.passed).then(|| {
            format!(
                "invariant audit failed: norm drift {:.3e}, energy drift {:.3e} (limit {AUDIT_TOLERANCE:e})",
                self.audit.max_norm_drift, self.audit.max_energy_drift
            )
        });
        let report = RunReport {
            experiment: experiment.to_string(),
            status: status.to_string(),
            seed,
            config,
            manifest,
            timings: Timings {
                wall_seconds: self.started.elapsed().as_secs_f64(),
                kernels: self.kernels,
            },
            audit: self.audit,
            summary: serde_json::Value::Object(self.summary),
            error: error.map(|e| e.to_string()).or(audit_error),
        };
        fs::write(self.dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        Ok(report)
    }
}
