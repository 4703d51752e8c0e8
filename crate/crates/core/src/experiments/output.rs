//! CSV tables with a provenance manifest line.

use std::io::Write;

use crate::error::{LabError, Result};

use super::config::Config;

/// A header row and string cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Write `manifest` as a `#` line, then the table.
    pub fn write_to<W: Write>(&self, mut out: W, manifest: &str) -> Result<()> {
        let io = |e: std::io::Error| LabError::Io { path: "<output>".into(), source: e };
        writeln!(out, "{manifest}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(|e| io(e.into()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)
    }

    pub fn to_string_with(&self, manifest: &str) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf, manifest)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// `# lamplab <version> command=<command> config_sha256=<hash>`.
pub fn manifest_line(command: &str, config: &Config) -> String {
    format!("# lamplab {} command={command} config_sha256={}", env!("CARGO_PKG_VERSION"), config.hash())
}

/// Format a float for CSV; `NaN` and infinities are spelled out.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}
