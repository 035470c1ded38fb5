//! Minimal CSV tables: fixed header, LF endings, numbers with 9 significant digits.
//!
//! Fields never contain commas or quotes, so no quoting is done.

use std::fmt::Write as _;
use std::path::Path;

use crate::{io_err, HarnessError, Result};

/// `x` with 9 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = match lines.next() {
            Some(h) if !h.is_empty() => h.split(',').map(str::to_string).collect(),
            _ => return Err(HarnessError::Csv("missing header".into())),
        };
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(HarnessError::Csv(format!("row {} has {} fields, expected {}", i + 1, row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Write `table` to `path`.
pub fn emit_csv(table: &CsvTable, path: &Path) -> Result<()> {
    std::fs::write(path, table.render()).map_err(io_err(path))
}
