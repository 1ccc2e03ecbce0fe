//! Result records and their CSV / JSON forms.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 10] = [
    "mode",
    "d",
    "n1",
    "n2",
    "n3",
    "omega",
    "init_seconds",
    "solve_seconds",
    "residual",
    "oracle_error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub mode: String,
    pub d: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: Option<usize>,
    pub omega: f64,
    pub init_seconds: f64,
    pub solve_seconds: f64,
    pub residual: f64,
    pub oracle_error: Option<f64>,
}

impl RunRecord {
    /// Number of unknowns.
    pub fn unknowns(&self) -> usize {
        self.n1 * self.n2 * self.n3.unwrap_or(1)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.mode.clone(),
            r.d.to_string(),
            r.n1.to_string(),
            r.n2.to_string(),
            opt(r.n3),
            float(r.omega),
            float(r.init_seconds),
            float(r.solve_seconds),
            float(r.residual),
            r.oracle_error.map(float).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("<csv output>", e))
}

pub fn write_json<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out).map_err(|e| CliError::io("<json output>", e))
}

pub fn emit(records: &[RunRecord], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| CliError::io(p, e))?;
            let w = std::io::BufWriter::new(file);
            match format {
                Format::Csv => write_csv(records, w),
                Format::Json => write_json(records, w),
            }
        }
        None => {
            let w = std::io::stdout().lock();
            match format {
                Format::Csv => write_csv(records, w),
                Format::Json => write_json(records, w),
            }
        }
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CliError::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

pub fn parse_json(text: &str) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_str(text)?)
}

/// Reads records from a file, picking the parser from the extension
/// (`.json`, anything else is CSV).
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}
