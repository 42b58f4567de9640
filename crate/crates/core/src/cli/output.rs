//! Rendering of results and the on-disk result cache.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::Format;
use crate::error::{Error, Result};

/// Parameter echo; sorted so that the rendering is canonical.
pub type Params = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Shortest round-trip decimal, in exponent form for very small or large
/// magnitudes.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => f.write_str(&format_real(*v)),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

/// A subcommand result: a table for CSV output and a structured value for
/// JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub result: serde_json::Value,
}

impl Report {
    pub fn new(columns: Vec<&'static str>, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            columns,
            rows: Vec::new(),
            result: serde_json::to_value(result).map_err(|e| Error::InvalidParameter(e.to_string()))?,
        })
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn render(params: &Params, report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in params {
                out.push_str(&format!("# {k}={v}\n"));
            }
            out.push_str(&report.columns.join(","));
            out.push('\n');
            for row in &report.rows {
                let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let doc = serde_json::json!({ "params": params, "result": report.result });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of everything that determines the output bytes.
pub fn run_key(params: &Params, format: Format) -> String {
    let mut canonical = String::new();
    for (k, v) in params {
        canonical.push_str(&format!("{k}={v}\n"));
    }
    canonical.push_str(&format!("format={}\n", format.extension()));
    sha256_hex(canonical.as_bytes())
}

/// Metadata stored beside each cached payload.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<'a> {
    pub subcommand: &'a str,
    pub params: &'a Params,
    pub version: &'a str,
    pub key: &'a str,
    pub output_sha256: String,
    pub wall_time_seconds: f64,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn payload_path(&self, key: &str, format: Format) -> PathBuf {
        self.dir.join(format!("{key}.{}", format.extension()))
    }

    pub fn lookup(&self, key: &str, format: Format) -> Option<String> {
        std::fs::read_to_string(self.payload_path(key, format)).ok()
    }

    pub fn store(&self, key: &str, format: Format, payload: &str, record: &RunRecord) -> Result<()> {
        let path = self.payload_path(key, format);
        std::fs::write(&path, payload).map_err(|e| Error::io(path.display().to_string(), e))?;
        let meta = self.dir.join(format!("{key}.record.json"));
        let text = serde_json::to_string_pretty(record).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        std::fs::write(&meta, text).map_err(|e| Error::io(meta.display().to_string(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Params, Report) {
        let mut params = Params::new();
        params.insert("n".into(), "2,3".into());
        params.insert("command".into(), "demo".into());
        let mut report = Report::new(vec!["n", "value"], serde_json::json!({"x": 1.5})).unwrap();
        report.push(vec![2usize.into(), 0.25.into()]);
        report.push(vec![3usize.into(), 1e-9.into()]);
        (params, report)
    }

    #[test]
    fn csv_layout() {
        let (params, report) = sample();
        let text = render(&params, &report, Format::Csv).unwrap();
        assert_eq!(text, "# command=demo\n# n=2,3\nn,value\n2,0.25\n3,1e-9\n");
    }

    #[test]
    fn json_layout() {
        let (params, report) = sample();
        let text = render(&params, &report, Format::Json).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["params"]["command"], "demo");
        assert_eq!(doc["result"]["x"], 1.5);
    }

    #[test]
    fn real_formatting_round_trips() {
        for v in [0.0, 1.0, -0.046191417, 1e-12, 3.5e20, 123456.789] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn key_depends_on_params_and_format() {
        let (params, _) = sample();
        let a = run_key(&params, Format::Csv);
        assert_eq!(a.len(), 64);
        assert_eq!(a, run_key(&params, Format::Csv));
        assert_ne!(a, run_key(&params, Format::Json));
        let mut other = params.clone();
        other.insert("n".into(), "2,4".into());
        assert_ne!(a, run_key(&other, Format::Csv));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let (params, _) = sample();
        let record = RunRecord {
            subcommand: "demo",
            params: &params,
            version: "0",
            key: "k",
            output_sha256: sha256_hex(b"payload"),
            wall_time_seconds: 0.1,
        };
        assert!(cache.lookup("k", Format::Csv).is_none());
        cache.store("k", Format::Csv, "payload", &record).unwrap();
        assert_eq!(cache.lookup("k", Format::Csv).unwrap(), "payload");
        assert!(dir.path().join("k.record.json").exists());
    }
}
