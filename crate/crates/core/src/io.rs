//! CSV helpers: dense matrices in, traces and point clouds out.
//!
//! Input matrices are comma-separated rows without a header. Output floats are
//! written with 17 significant digits so they round-trip exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Parse a headerless numeric CSV into a dense matrix.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            },
            _ => csv_err(path, e),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| csv_err(path, format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    rows_to_matrix(&rows).map_err(|e| csv_err(path, e))
}

/// Read a vector stored either as a single row or a single column.
pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix(path)?;
    if m.nrows() == 1 || m.ncols() == 1 {
        Ok(DVector::from_iterator(m.len(), m.iter().copied()))
    } else {
        Err(csv_err(
            path,
            format!("expected a single row or column, got {}x{}", m.nrows(), m.ncols()),
        ))
    }
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("ragged matrix rows"));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Write rows of floats under an optional header.
pub fn write_rows<W: Write>(out: W, header: Option<&[&str]>, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    if let Some(h) = header {
        w.write_record(h).map_err(wrap)?;
    }
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v))).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<output>".into(),
        source: e,
    })
}

pub fn create(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.display().to_string(),
            source: e,
        })?;
    }
    File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}
