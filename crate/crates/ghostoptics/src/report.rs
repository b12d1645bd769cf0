//! `report.txt`: `key = value` lines, then the echoed config after a
//! `[config]` marker.
//!
//! Keys: `scenario`, `seed`, `version`, `wall_clock_s`, `metric.<name>`,
//! `note.<name>`, `warning`, and per file `file.<name>.sha256` /
//! `file.<name>.bytes`. Heatmaps add `file.<name>.min` / `.max`, the values
//! mapped to gray levels 0 and 255.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Result, RunError};

#[derive(Clone, Debug, PartialEq)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
    pub range: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub version: String,
    pub wall_clock_s: f64,
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
    pub config: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn note(&self, name: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn set_metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_owned(), value));
    }

    pub fn set_note(&mut self, name: &str, value: impl Into<String>) {
        self.notes.push((name.to_owned(), value.into()));
    }

    /// Writes `bytes` to `dir/name` and records its hash.
    pub fn emit(&mut self, dir: &Path, name: &str, bytes: &[u8], range: Option<(f64, f64)>) -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| RunError::io(&path, e))?;
        self.files.push(FileEntry {
            name: name.to_owned(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
            range,
        });
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "wall_clock_s = {:.3}", self.wall_clock_s);
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "metric.{k} = {v}");
        }
        for (k, v) in &self.notes {
            let _ = writeln!(s, "note.{k} = {v}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning = {w}");
        }
        for f in &self.files {
            let _ = writeln!(s, "file.{}.sha256 = {}", f.name, f.sha256);
            let _ = writeln!(s, "file.{}.bytes = {}", f.name, f.bytes);
            if let Some((lo, hi)) = f.range {
                let _ = writeln!(s, "file.{}.min = {lo}", f.name);
                let _ = writeln!(s, "file.{}.max = {hi}", f.name);
            }
        }
        s.push_str("[config]\n");
        s.push_str(&self.config);
        s
    }
}

/// Parses the `key = value` part of a report (stops at `[config]`).
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| *l != "[config]")
        .filter_map(|l| l.split_once(" = ").map(|(k, v)| (k.to_owned(), v.to_owned())))
        .collect()
}
