//! CSV tables and run manifests.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so output is
//! byte-identical across runs with the same inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(x),
            Cell::Flag(b) => u8::from(b).to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Dimension {
                expected: self.header.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Write to `path` and return the manifest entry.
    pub fn write(&self, path: &Path) -> Result<FileEntry> {
        write_file(path, self.render().as_bytes(), Some(self.rows.len()))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Num(x) => x,
                    Cell::Flag(b) => f64::from(u8::from(b)),
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, bytes: &[u8], rows: Option<usize>) -> Result<FileEntry> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(FileEntry {
        path: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: sha256_hex(bytes),
        rows,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<FileEntry> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::numerical(format!("cannot serialise JSON: {e}")))?;
    text.push('\n');
    write_file(path, text.as_bytes(), None)
}

/// Output directory: explicit flag, then `FQSD_OUT_DIR`, then the config, then `out`.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out"))
}

pub const OUT_DIR_ENV: &str = "FQSD_OUT_DIR";
