//! Matrix and label file I/O.
//!
//! Binary format (`.bin`, default): 8-byte magic `OMPBIN01`, unsigned 32-bit
//! little-endian row and column counts, then `rows * cols` little-endian
//! 64-bit floats in row-major order. A `.csv` extension selects the text
//! format instead: a `rows,cols` header line followed by one comma-separated
//! line per row. Non-finite values are rejected in both directions, naming
//! the byte offset (binary) or line (CSV).

use std::fs;
use std::io::Write;
use std::path::Path;

use omp_core::{DenseMatrix, Layout};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"OMPBIN01";

const HEADER_LEN: usize = 8 + 4 + 4;

fn is_csv(path: &Path) -> bool {
    path.extension().map(|e| e.eq_ignore_ascii_case("csv")).unwrap_or(false)
}

/// Saves a matrix, choosing the format by extension.
pub fn save_matrix(path: &Path, matrix: &DenseMatrix) -> Result<()> {
    if is_csv(path) {
        save_matrix_csv(path, matrix)
    } else {
        save_matrix_binary(path, matrix)
    }
}

/// Loads a matrix, choosing the format by extension. Row-contiguous result.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix> {
    if is_csv(path) {
        load_matrix_csv(path)
    } else {
        load_matrix_binary(path)
    }
}

fn save_matrix_binary(path: &Path, matrix: &DenseMatrix) -> Result<()> {
    let rows = matrix.rows();
    let cols = matrix.cols();
    if rows > u32::MAX as usize || cols > u32::MAX as usize {
        return Err(CliError::format(path, "matrix dimensions exceed the 32-bit header"));
    }
    let mut bytes = Vec::with_capacity(HEADER_LEN + rows * cols * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(rows as u32).to_le_bytes());
    bytes.extend_from_slice(&(cols as u32).to_le_bytes());
    for i in 0..rows {
        for j in 0..cols {
            let v = matrix.get(i, j);
            if !v.is_finite() {
                let offset = HEADER_LEN + (i * cols + j) * 8;
                return Err(CliError::format(
                    path,
                    format!("non-finite value {v} at byte offset {offset}"),
                ));
            }
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(&bytes).map_err(|e| CliError::io(path, e))?;
    Ok(())
}

fn load_matrix_binary(path: &Path) -> Result<DenseMatrix> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.len() < HEADER_LEN {
        return Err(CliError::format(
            path,
            format!("truncated header: expected at least {HEADER_LEN} bytes, found {}", bytes.len()),
        ));
    }
    if &bytes[..8] != MAGIC {
        return Err(CliError::format(path, "bad magic (expected OMPBIN01)"));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = HEADER_LEN + rows * cols * 8;
    if bytes.len() != expected {
        return Err(CliError::format(
            path,
            format!("truncated payload: expected {expected} bytes, found {}", bytes.len()),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (idx, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            let offset = HEADER_LEN + idx * 8;
            return Err(CliError::format(
                path,
                format!("non-finite value {v} at byte offset {offset}"),
            ));
        }
        data.push(v);
    }
    DenseMatrix::new(rows, cols, Layout::RowContiguous, data).map_err(CliError::Core)
}

fn save_matrix_csv(path: &Path, matrix: &DenseMatrix) -> Result<()> {
    let mut text = format!("{},{}\n", matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        for j in 0..matrix.cols() {
            let v = matrix.get(i, j);
            if !v.is_finite() {
                return Err(CliError::format(
                    path,
                    format!("non-finite value {v} at row {i}, column {j}"),
                ));
            }
            if j > 0 {
                text.push(',');
            }
            // Debug formatting round-trips f64 exactly.
            text.push_str(&format!("{v:?}"));
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_matrix_csv(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::format(path, "empty file; expected a rows,cols header"))?;
    let mut parts = header.split(',');
    let parse_dim = |s: Option<&str>| -> Result<usize> {
        s.and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| CliError::format(path, format!("bad header line {header:?}")))
    };
    let rows = parse_dim(parts.next())?;
    let cols = parse_dim(parts.next())?;
    if parts.next().is_some() {
        return Err(CliError::format(path, format!("bad header line {header:?}")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0usize;
    for (line_no, line) in lines {
        let values: Vec<&str> = line.split(',').collect();
        if values.len() != cols {
            return Err(CliError::format(
                path,
                format!("line {}: expected {cols} values, found {}", line_no + 1, values.len()),
            ));
        }
        for raw in values {
            let v: f64 = raw.trim().parse().map_err(|_| {
                CliError::format(path, format!("line {}: bad number {raw:?}", line_no + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::format(
                    path,
                    format!("line {}: non-finite value {v}", line_no + 1),
                ));
            }
            data.push(v);
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(CliError::format(
            path,
            format!("expected {rows} data rows, found {seen_rows}"),
        ));
    }
    DenseMatrix::from_row_major(rows, cols, data).map_err(CliError::Core)
}

/// Loads one integer label per non-empty line.
pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(line_no, l)| {
            l.trim().parse().map_err(|_| {
                CliError::format(path, format!("line {}: bad label {l:?}", line_no + 1))
            })
        })
        .collect()
}

/// Writes one label per line.
pub fn save_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut text = String::new();
    for l in labels {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
