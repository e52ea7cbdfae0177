//! Headerless numeric CSV: one row per line, comma-separated decimals.
//!
//! Readers reject ragged rows. Writers use the shortest representation that
//! parses back to the same `f64`, so files round-trip exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::applications::CompletionObservation;
use crate::error::{Error, Result};
use crate::linalg::{RectMatrix, SymMatrix};

pub fn read_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("row {}: `{field}` is not a number", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_rows<W: Write>(writer: W, rows: &[Vec<f64>]) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in rows {
        csv.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_rows_from(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    read_rows(File::open(path)?)
}

pub fn write_rows_to(path: impl AsRef<Path>, rows: &[Vec<f64>]) -> Result<()> {
    write_rows(File::create(path)?, rows)
}

pub fn read_rect_matrix(path: impl AsRef<Path>) -> Result<RectMatrix> {
    RectMatrix::from_rows(&read_rows_from(path)?)
}

pub fn read_sym_matrix(path: impl AsRef<Path>) -> Result<SymMatrix> {
    SymMatrix::from_rows(&read_rows_from(path)?)
}

/// Reads one vector per row; all rows must share a length.
pub fn read_vectors(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let rows = read_rows_from(path)?;
    if rows.is_empty() {
        return Err(Error::Parse("no vectors in input".into()));
    }
    Ok(rows)
}

/// Reads a sample of symmetric matrices, one per row, flattened row-major.
pub fn read_matrix_sample(path: impl AsRef<Path>) -> Result<Vec<SymMatrix>> {
    let rows = read_rows_from(path)?;
    rows.into_iter()
        .map(|row| {
            let d = (row.len() as f64).sqrt().round() as usize;
            if d * d != row.len() {
                return Err(Error::Parse(format!(
                    "row of length {} is not a flattened square matrix",
                    row.len()
                )));
            }
            SymMatrix::new(d, row)
        })
        .collect()
}

/// Reads completion observations `row,col,y` with 0-based indices.
pub fn read_observations(path: impl AsRef<Path>) -> Result<Vec<CompletionObservation>> {
    read_rows_from(path)?
        .into_iter()
        .enumerate()
        .map(|(line, r)| {
            if r.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected `row,col,y`", line + 1)));
            }
            let index = |v: f64| {
                if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
                    Ok(v as usize)
                } else {
                    Err(Error::Parse(format!("row {}: `{v}` is not a valid index", line + 1)))
                }
            };
            Ok(CompletionObservation { row: index(r[0])?, col: index(r[1])?, y: r[2] })
        })
        .collect()
}

pub fn write_observations(path: impl AsRef<Path>, obs: &[CompletionObservation]) -> Result<()> {
    let rows: Vec<Vec<f64>> = obs.iter().map(|o| vec![o.row as f64, o.col as f64, o.y]).collect();
    write_rows_to(path, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_rows() {
        let rows = read_rows("1,2.5,-3\n4, 5e-3 ,6\n".as_bytes()).unwrap();
        assert_eq!(rows, vec![vec![1.0, 2.5, -3.0], vec![4.0, 0.005, 6.0]]);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(matches!(read_rows("1,2\n3\n".as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_non_numbers() {
        assert!(matches!(read_rows("1,abc\n".as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn write_then_read_is_exact() {
        let rows = vec![vec![0.1 + 0.2, -1e-300, 12345.678901234567], vec![1.0 / 3.0, 0.0, -7.0]];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        assert_eq!(read_rows(buf.as_slice()).unwrap(), rows);
    }
}
