//! Report assembly and serialisation.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

/// Shortest round-trip form; exponent notation outside `[1e−4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub command: &'static str,
    pub doc: Value,
    pub table: Table,
    /// Set when a verification produced FAIL verdicts.
    pub failed: bool,
}

impl CommandOutput {
    pub fn new(command: &'static str, doc: Value, table: Table) -> Self {
        Self {
            command,
            doc,
            table,
            failed: false,
        }
    }

    /// Pretty JSON with the command, config hash and seed at the top level.
    pub fn to_json(&self, hash: &str, seed: Option<u64>) -> Result<Vec<u8>> {
        let mut doc = self.doc.clone();
        let obj = doc.as_object_mut().context("report must be a JSON object")?;
        obj.insert("command".into(), self.command.into());
        obj.insert("config_sha256".into(), hash.into());
        obj.insert("seed".into(), seed.into());
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// CSV preceded by one `#` line carrying the config hash and seed.
    pub fn to_csv(&self, hash: &str, seed: Option<u64>) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        let seed = seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
        writeln!(buf, "# command={} config_sha256={hash} seed={seed}", self.command)?;
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            w.write_record(&self.table.header)?;
            for r in &self.table.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
