//! Plain CSV output with comment headers.
//!
//! Every file starts with `#` lines describing its contents and the units of
//! each column, followed by one header row. Floats are written with 17
//! significant digits so they parse back to the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(usize),
    B(bool),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_owned())
    }
}

/// An in-memory CSV document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    text: String,
    width: usize,
}

impl Table {
    /// Starts a table with comment lines and `(name, unit)` columns. The
    /// units are collected into a final `# units:` comment.
    pub fn new(comments: &[String], columns: &[(&str, &str)]) -> Self {
        let mut text = String::new();
        for c in comments {
            writeln!(text, "# {c}").unwrap();
        }
        let units: Vec<String> = columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        writeln!(text, "# units: {}", units.join(", ")).unwrap();
        let names: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
        writeln!(text, "{}", names.join(",")).unwrap();
        Table {
            text,
            width: columns.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.width, "row width does not match the header");
        let fields: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::F(x) => fmt_f64(x),
                Cell::I(i) => i.to_string(),
                Cell::B(b) => u8::from(b).to_string(),
                Cell::S(s) => s,
            })
            .collect();
        writeln!(self.text, "{}", fields.join(",")).unwrap();
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write_to(&self, path: &Path) -> Result<PathBuf> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        fs::write(path, &self.text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(path.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn layout() {
        let mut t = Table::new(&["demo".into()], &[("n", "1"), ("p", "probability")]);
        t.row(vec![3usize.into(), 0.5.into()]);
        assert_eq!(
            t.as_str(),
            "# demo\n# units: n [1], p [probability]\nn,p\n3,5.0000000000000000e-1\n"
        );
    }
}
