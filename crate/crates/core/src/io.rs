//! JSON matrix files: `{"rows": r, "cols": c, "data": [[re, im], ...]}` in
//! row-major order. Numbers are written with 17 significant digits so every
//! `f64` survives a write/read cycle bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

fn number(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String");
}

/// Serializes `x`. Entries are finite by construction of [`ComplexMatrix`].
pub fn matrix_to_json(x: &ComplexMatrix) -> String {
    let mut out = format!("{{\n  \"rows\": {},\n  \"cols\": {},\n  \"data\": [", x.rows(), x.cols());
    for (k, z) in x.data().iter().enumerate() {
        out.push_str(if k == 0 { "\n    [" } else { ",\n    [" });
        number(&mut out, z.re);
        out.push_str(", ");
        number(&mut out, z.im);
        out.push(']');
    }
    out.push_str("\n  ]\n}\n");
    out
}

/// Parses and validates a matrix file body; `origin` labels errors.
pub fn matrix_from_json(text: &str, origin: &str) -> Result<ComplexMatrix> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let data = file.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    ComplexMatrix::new(file.rows, file.cols, data).map_err(|e| parse_err(e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    matrix_from_json(&text, &path.display().to_string())
}

pub fn write_matrix(path: &Path, x: &ComplexMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(x)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
