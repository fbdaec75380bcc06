//! Result tables and their CSV form.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use ringsqueeze::Error as ModelError;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Short tag written to the `flag` column for a failed grid point.
pub fn flag_for(err: &ModelError) -> &'static str {
    match err {
        ModelError::Threshold { .. } => "threshold",
        ModelError::Pole(_) => "pole",
        ModelError::Divergence { .. } => "divergence",
        ModelError::NotConverged { .. } => "not_converged",
        ModelError::Singular { .. } => "singular",
        ModelError::Domain { .. } | ModelError::DegenerateCavity => "domain",
    }
}

/// One record: numeric values plus an optional failure flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub flag: Option<&'static str>,
}

impl Row {
    pub fn ok(values: Vec<f64>) -> Self {
        Self { values, flag: None }
    }

    /// Keeps the first `keep` values (the grid coordinates) and fills the
    /// remaining `width - keep` columns with `inf`.
    pub fn failed(mut values: Vec<f64>, keep: usize, width: usize, err: &ModelError) -> Self {
        values.truncate(keep);
        values.resize(width, f64::INFINITY);
        Self {
            values,
            flag: Some(flag_for(err)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub config_sha256: String,
}

impl ResultTable {
    pub fn new(columns: &[&str], canonical_config: &str) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            config_sha256: config_hash(canonical_config),
        }
    }

    pub fn push(&mut self, row: Row) {
        assert_eq!(row.values.len(), self.columns.len(), "row width must match columns");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[j]).collect())
    }

    /// CSV text: metadata comments, header, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool_version={TOOL_VERSION}");
        let _ = writeln!(out, "# config_sha256={}", self.config_sha256);
        for c in &self.columns {
            out.push_str(c);
            out.push(',');
        }
        out.push_str("flag\n");
        for row in &self.rows {
            for v in &row.values {
                out.push_str(&format_number(*v));
                out.push(',');
            }
            out.push_str(row.flag.unwrap_or(""));
            out.push('\n');
        }
        out
    }
}

/// Round-trip scientific notation; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

pub fn write_table(table: &ResultTable, path: &Path) -> Result<(), WriteError> {
    std::fs::write(path, table.to_csv()).map_err(|source| WriteError {
        path: path.to_path_buf(),
        source,
    })
}
