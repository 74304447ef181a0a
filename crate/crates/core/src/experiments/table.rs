use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::{ExperimentConfig, OutputFormat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub version: String,
    /// Seconds since the Unix epoch at the end of the run.
    pub timestamp: u64,
    /// Fits, verdicts and other per-run results.
    pub summary: Map<String, Value>,
}

/// Rows of named columns. Every row carries `seed` (the master seed) and
/// the trial index range `trial_lo..=trial_hi` that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        let mut cols = vec!["seed".to_string(), "trial_lo".to_string(), "trial_hi".to_string()];
        cols.extend(columns.iter().map(|c| c.to_string()));
        ResultTable {
            metadata: Metadata {
                config: config.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: 0,
                summary: Map::new(),
            },
            columns: cols,
            rows: Vec::new(),
        }
    }

    /// Append a row for trials `lo..=hi`.
    pub fn push(&mut self, trials: (u64, u64), values: Vec<Value>) {
        assert_eq!(values.len() + 3, self.columns.len(), "row width must match the columns");
        let mut row = vec![self.metadata.config.seed.into(), trials.0.into(), trials.1.into()];
        row.extend(values);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.summary.insert(key.to_string(), value.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column with `null` as `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(self.column(name)?.into_iter().map(Value::as_f64).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Write to `path` (extension replaced): `.json`, or `.csv` with the
    /// metadata in a `.meta.json` sidecar, or all of them. Returns the
    /// files written.
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let files = output_paths(path, format);
        for f in &files {
            let name = f.to_string_lossy();
            let body = if name.ends_with(".meta.json") {
                serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
            } else if name.ends_with(".json") {
                self.to_json()
            } else {
                self.to_csv()?
            };
            std::fs::write(f, body)?;
        }
        Ok(files)
    }
}

/// Files produced by [`ResultTable::write`] for `path` and `format`.
pub fn output_paths(path: &Path, format: OutputFormat) -> Vec<PathBuf> {
    let mut v = Vec::new();
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        v.push(path.with_extension("json"));
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        v.push(path.with_extension("csv"));
        v.push(path.with_extension("meta.json"));
    }
    v
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
