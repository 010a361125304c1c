//! Reading and writing the JSON matrix format
//! `{"dim": 2|4, "entries": [[re, im], ...]}` (row-major, `dim²` entries).
//!
//! Reals are written with the shortest decimal representation that parses
//! back to the identical `f64`, so a write/read round trip is exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{c64, GateMatrix2, GateMatrix4, Mat};

/// Errors from the file formats (matrix JSON and circuit text).
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Dimension { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    LineIndex {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// A parsed matrix of either supported size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyMatrix {
    Two(GateMatrix2),
    Four(GateMatrix4),
}

impl AnyMatrix {
    pub fn dim(&self) -> usize {
        match self {
            AnyMatrix::Two(_) => 2,
            AnyMatrix::Four(_) => 4,
        }
    }
}

#[derive(Deserialize)]
struct RawDoc {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a matrix document held in memory; `path` is used for messages only.
pub fn parse_matrix_str(text: &str, path: &Path) -> Result<AnyMatrix, FormatError> {
    let doc: RawDoc = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: format!("column {}: {e}", e.column()),
    })?;
    let dimension = |message: String| FormatError::Dimension {
        path: path.to_path_buf(),
        message,
    };
    if doc.dim != 2 && doc.dim != 4 {
        return Err(dimension(format!("dim must be 2 or 4, found {}", doc.dim)));
    }
    if doc.entries.len() != doc.dim * doc.dim {
        return Err(dimension(format!(
            "dim {} needs {} entries, found {}",
            doc.dim,
            doc.dim * doc.dim,
            doc.entries.len()
        )));
    }
    let entries: Vec<_> = doc.entries.iter().map(|&[re, im]| c64(re, im)).collect();
    Ok(match doc.dim {
        2 => AnyMatrix::Two(Mat::from_row_major(&entries).expect("length checked")),
        _ => AnyMatrix::Four(Mat::from_row_major(&entries).expect("length checked")),
    })
}

/// Reads a matrix file. Unitarity is not checked here.
pub fn parse_matrix_file(path: impl AsRef<Path>) -> Result<AnyMatrix, FormatError> {
    let path = path.as_ref();
    parse_matrix_str(&read_to_string(path)?, path)
}

/// Serializes a matrix as a pretty-printed JSON document.
pub fn matrix_to_json<const N: usize>(m: &Mat<N>) -> String
where
    Mat<N>: Serialize,
{
    serde_json::to_string_pretty(m).expect("matrices always serialize")
}

pub fn write_matrix_file<const N: usize>(
    path: impl AsRef<Path>,
    m: &Mat<N>,
) -> Result<(), FormatError>
where
    Mat<N>: Serialize,
{
    let path = path.as_ref();
    fs::write(path, matrix_to_json(m) + "\n").map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}
