//! Matrix files: CSV with an optional header row, or the binary layout
//! `b"BJNLMAT1"`, rows as `u64` LE, columns as `u64` LE, then `f64` LE
//! values in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"BJNLMAT1";

fn ingest_err(path: &Path, location: String, message: impl Into<String>) -> Error {
    Error::Ingestion {
        location: format!("{}: {location}", path.display()),
        message: message.into(),
    }
}

/// Loads a `T x p` matrix; non-finite values are rejected.
pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        parse_binary(path, &bytes)
    } else {
        parse_csv(path, &bytes)
    }
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<DMatrix<f64>> {
    if bytes.len() < 24 {
        return Err(ingest_err(path, "header".into(), "truncated binary header"));
    }
    let rd = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes")) as usize;
    let (rows, cols) = (rd(8), rd(16));
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(24))
        .ok_or_else(|| ingest_err(path, "header".into(), "dimensions overflow"))?;
    if bytes.len() != expected {
        return Err(ingest_err(
            path,
            "body".into(),
            format!("expected {expected} bytes for {rows}x{cols}, found {}", bytes.len()),
        ));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for (i, chunk) in bytes[24..].chunks_exact(8).enumerate() {
        let x = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        if !x.is_finite() {
            return Err(ingest_err(
                path,
                format!("row {}, column {}", i / cols + 1, i % cols + 1),
                format!("non-finite value {x}"),
            ));
        }
        values.push(x);
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

fn parse_csv(path: &Path, bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ingest_err(path, format!("line {}", line + 1), e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if line == 0 && parsed.iter().all(|r| r.is_err()) {
            continue; // header
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(ingest_err(
                    path,
                    format!("line {}", line + 1),
                    format!("ragged row: {} fields, expected {c}", record.len()),
                ));
            }
            _ => {}
        }
        for (j, (cell, r)) in record.iter().zip(parsed).enumerate() {
            let loc = || format!("line {}, column {}", line + 1, j + 1);
            match r {
                Ok(x) if x.is_finite() => values.push(x),
                Ok(_) => return Err(ingest_err(path, loc(), format!("non-finite value '{cell}'"))),
                Err(_) => return Err(ingest_err(path, loc(), format!("non-numeric cell '{cell}'"))),
            }
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn write_matrix_binary(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 8 * m.len());
    buf.extend_from_slice(BINARY_MAGIC);
    buf.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            buf.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Headerless CSV with shortest round-trip formatting.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}
