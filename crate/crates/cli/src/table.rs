//! Plain-text export formats.
//!
//! A [`Table`] is a CSV file with a block of `# key: value` comment lines, a
//! header row and numeric rows. Two-dimensional maps are tables whose first
//! column holds the row axis and whose header carries the column axis.
//! Numbers are written with Rust's shortest round-trip formatting, so reading
//! a file and writing it back reproduces it byte for byte.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tcfwm::{Matrix, C64};

use crate::config::Complex;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub comments: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { comments: Vec::new(), header, rows: Vec::new() }
    }

    pub fn comment(mut self, key: &str, value: impl ToString) -> Self {
        self.comments.push((key.to_string(), value.to_string()));
        self
    }

    /// A real map with `row_axis` values down the first column.
    pub fn map(row_name: &str, rows: &[f64], col_name: &str, cols: &[f64], value: impl Fn(usize, usize) -> f64) -> Self {
        let mut header = vec![format!("{row_name}\\{col_name}")];
        header.extend(cols.iter().map(|c| c.to_string()));
        let mut t = Table::new(header).comment("rows", row_name).comment("cols", col_name);
        for (i, r) in rows.iter().enumerate() {
            let mut line = Vec::with_capacity(cols.len() + 1);
            line.push(*r);
            line.extend((0..cols.len()).map(|j| value(i, j)));
            t.rows.push(line);
        }
        t
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<(), CliError> {
        for (k, v) in &self.comments {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            // `+ 0.0` folds negative zero
            w.write_record(row.iter().map(|v| (v + 0.0).to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Self, CliError> {
        let mut reader = BufReader::new(input);
        let mut comments = Vec::new();
        let mut rest = String::new();
        let mut line = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            match line.strip_prefix("# ") {
                Some(c) if rest.is_empty() => {
                    let (k, v) = c
                        .trim_end_matches(['\n', '\r'])
                        .split_once(": ")
                        .ok_or_else(|| CliError::Input(format!("malformed comment line {line:?}")))?;
                    comments.push((k.to_string(), v.to_string()));
                }
                _ => {
                    rest.push_str(&line);
                    reader.read_to_string(&mut rest)?;
                    break;
                }
            }
        }
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (n, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Input(format!("row {}: {e}", n + 1)))?;
            rows.push(row);
        }
        Ok(Self { comments, header, rows })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        let f = std::fs::File::create(path).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn read_file(path: &Path) -> Result<Self, CliError> {
        let f = std::fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::read_from(f).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// Complex matrix as nested `{re, im}` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMap {
    pub rows_axis: String,
    pub cols_axis: String,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub values: Vec<Vec<Complex>>,
}

impl ComplexMap {
    pub fn new(rows_axis: &str, rows: &[f64], cols_axis: &str, cols: &[f64], m: &Matrix) -> Self {
        Self {
            rows_axis: rows_axis.into(),
            cols_axis: cols_axis.into(),
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            values: (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].into()).collect()).collect(),
        }
    }
}

pub fn complex_list(v: &[C64]) -> Vec<Complex> {
    v.iter().map(|z| (*z).into()).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        Table::map("tau_ps", &[-0.5, 0.0, 1.0 / 3.0], "t_ps", &[0.0, 0.1, 0.30000000000000004], |i, j| {
            (i as f64 + 0.1) * 1e-7 / (j as f64 + 3.0)
        })
        .comment("quantity", "|P|^2 (arb. units)")
    }

    #[test]
    fn write_read_write_is_byte_identical() {
        let mut a = Vec::new();
        sample().write_to(&mut a).unwrap();
        let back = Table::read_from(a.as_slice()).unwrap();
        assert_eq!(back, sample());
        let mut b = Vec::new();
        back.write_to(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_rows_are_input_errors() {
        let text = "energy_ueV,intensity\n1,2\n3,abc\n";
        assert!(matches!(Table::read_from(text.as_bytes()), Err(CliError::Input(_))));
        let ragged = "energy_ueV,intensity\n1,2\n3\n";
        assert!(matches!(Table::read_from(ragged.as_bytes()), Err(CliError::Input(_))));
    }
}
