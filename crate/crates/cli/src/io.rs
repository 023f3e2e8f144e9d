//! Matrix files: `{"partition": [d1, d2, ...], "matrix": [[[re, im], ...], ...]}`.
//!
//! Rows may also be given as one flat row-major list of `[re, im]` pairs. Output always
//! uses nested rows.

use std::fs;
use std::io::Write;
use std::path::Path;

use qfm_core::blocklin::PartitionedMatrix;
use qfm_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Hermitian tolerance (relative) for matrices read from disk.
pub const FILE_HERMITIAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub partition: Vec<usize>,
    pub matrix: Entries,
}

impl MatrixFile {
    pub fn from_matrix(a: &PartitionedMatrix) -> Self {
        let m = a.entries();
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        Self {
            partition: a.dims().to_vec(),
            matrix: Entries::Rows(rows),
        }
    }

    pub fn to_matrix(&self) -> Result<PartitionedMatrix, CliError> {
        let side: usize = self.partition.iter().sum();
        if self.partition.is_empty() || self.partition.contains(&0) {
            return Err(CliError::Dimension(format!(
                "block sizes must be positive, got {:?}",
                self.partition
            )));
        }
        let flat: Vec<[f64; 2]> = match &self.matrix {
            Entries::Rows(rows) => {
                if rows.len() != side {
                    return Err(CliError::Dimension(format!(
                        "partition sums to {side} but the matrix has {} rows",
                        rows.len()
                    )));
                }
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != side) {
                    return Err(CliError::Dimension(format!(
                        "row {i} has {} entries, expected {side}",
                        r.len()
                    )));
                }
                rows.concat()
            }
            Entries::Flat(v) => {
                if v.len() != side * side {
                    return Err(CliError::Dimension(format!(
                        "partition sums to {side} but the flat matrix has {} entries",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if flat.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Parse("matrix entries must be finite".into()));
        }
        let m = CMatrix::from_row_iterator(side, side, flat.iter().map(|&[re, im]| C64::new(re, im)));
        Ok(PartitionedMatrix::with_tolerance(
            self.partition.clone(),
            m,
            FILE_HERMITIAN_TOL,
        )?)
    }
}

pub fn parse_matrix_str(text: &str) -> Result<PartitionedMatrix, CliError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn parse_matrix_file(path: &Path) -> Result<PartitionedMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text)
}

fn compact<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

impl MatrixFile {
    /// JSON text with one matrix row per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = match &self.matrix {
            Entries::Rows(rows) => rows.iter().map(compact).collect(),
            Entries::Flat(v) => v.iter().map(compact).collect(),
        };
        format!(
            "{{\n  \"partition\": {},\n  \"matrix\": [\n    {}\n  ]\n}}\n",
            compact(&self.partition),
            rows.join(",\n    ")
        )
    }
}

/// Writes pretty JSON with a trailing newline to `out`, or to stdout.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(&text, out)
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            }),
    }
}
