//! CSV tables and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Floats are written with 17 significant digits, enough to round-trip.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len(), "row width for {:?}", self.headers);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    /// Inverse of [`Table::to_csv`], for the round-trip checks.
    pub fn from_csv(bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
        let headers = r.headers()?.iter().map(String::from).collect();
        let rows =
            r.records().map(|rec| rec.map(|rec| rec.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
        Ok((headers, rows))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub cap: u64,
    pub wall_time_secs: f64,
    pub version: String,
    pub check: Option<bool>,
    pub outputs: Vec<OutputDigest>,
    pub summary: serde_json::Value,
}

/// Writes `<command>.csv` and `<command>.manifest.json` under `dir`.
pub fn write_run(dir: &Path, command: &str, csv: &[u8], mut manifest: RunManifest) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{command}.csv"));
    fs::write(&csv_path, csv)?;
    manifest.outputs = vec![OutputDigest { path: csv_path, sha256: sha256_hex(csv) }];
    let manifest_path = dir.join(format!("{command}.manifest.json"));
    fs::write(&manifest_path, serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(-0.5773502691896258), "-5.7735026918962584e-1");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), b"a,b\n");
    }

    #[test]
    fn exact_fields_are_quoted_and_survive() {
        let mut t = Table::new(&["exact", "x"]);
        t.push(vec!["num=[-1,0];den=1;qpow=-1".into(), float(1.5)]);
        let bytes = t.to_csv().unwrap();
        assert_eq!(
            String::from_utf8(bytes.clone()).unwrap(),
            "exact,x\n\"num=[-1,0];den=1;qpow=-1\",1.5000000000000000e0\n"
        );
        let (h, rows) = Table::from_csv(&bytes).unwrap();
        assert_eq!(h, vec!["exact", "x"]);
        assert_eq!(rows[0][0], "num=[-1,0];den=1;qpow=-1");
    }

    #[test]
    fn digest_tracks_content() {
        assert_ne!(sha256_hex(b"a,b\n"), sha256_hex(b"a,b\n1,2\n"));
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
