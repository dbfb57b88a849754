//! Dense text format for symmetric matrices: first line `n`, then n rows of
//! n space-separated decimals in shortest round-trip form.

use grsd_core::rayleigh::SymmetricPSDMatrix;
use nalgebra::DMatrix;
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum MatrixIoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] grsd_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_matrix(path: &Path, a: &SymmetricPSDMatrix) -> Result<(), MatrixIoError> {
    let n = a.n();
    let mut out = Vec::new();
    writeln!(out, "{n}")?;
    let mut buffer = ryu::Buffer::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| buffer.format(a.entries()[(i, j)]).to_string())
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<SymmetricPSDMatrix, MatrixIoError> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let parse = |line: usize, message: String| MatrixIoError::Parse {
        path: display.clone(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse(1, "empty file".into()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| parse(1, format!("expected the dimension n, got {header:?}")))?;
    if n == 0 {
        return Err(parse(1, "dimension must be positive".into()));
    }
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        let line_no = i + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse(line_no, format!("expected {n} rows, file ends early")))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(parse(
                line_no,
                format!("expected {n} entries, got {}", values.len()),
            ));
        }
        for (j, v) in values.iter().enumerate() {
            entries[(i, j)] = v
                .parse()
                .map_err(|_| parse(line_no, format!("bad number {v:?}")))?;
        }
    }
    Ok(SymmetricPSDMatrix::new(entries)?)
}
