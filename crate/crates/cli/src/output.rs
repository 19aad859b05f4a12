//! Deterministic CSV files: a `# qwalk` metadata line, a header row, then
//! rows with floats in 17-significant-digit scientific notation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Resolved run parameters, written as the metadata line of every file.
#[derive(Debug, Clone)]
pub struct Meta {
    command: String,
    pairs: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            pairs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.pairs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!("# qwalk {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.pairs {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }
}

pub struct Csv {
    path: PathBuf,
    out: BufWriter<File>,
    width: usize,
}

impl Csv {
    pub fn create(dir: &Path, name: &str, meta: &Meta, header: &[String]) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
        let path = dir.join(format!("{name}.csv"));
        let file = File::create(&path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        let mut csv = Self {
            path,
            out: BufWriter::new(file),
            width: header.len(),
        };
        csv.write_line(&meta.line())?;
        csv.write_line(&header.join(","))?;
        Ok(csv)
    }

    pub fn row(&mut self, cells: &[String]) -> Result<(), CliError> {
        debug_assert_eq!(cells.len(), self.width, "row width");
        self.write_line(&cells.join(","))
    }

    fn write_line(&mut self, line: &str) -> Result<(), CliError> {
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| CliError::Io { path: self.path.clone(), source: e })
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.out.flush().map_err(|e| CliError::Io { path: self.path.clone(), source: e })?;
        Ok(self.path)
    }
}

pub fn header(first: &[&str], prefix: &str, count: usize) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain((0..count).map(|i| format!("{prefix}{i}")))
        .collect()
}
