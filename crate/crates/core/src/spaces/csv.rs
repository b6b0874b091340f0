//! Plain-text matrix files: one row per line, comma separated, lines
//! starting with `#` ignored.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::linalg::DenseMatrix;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: u64, message: String },
    #[error("{path}: no matrix rows")]
    Empty { path: String },
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix, CsvError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let file = File::open(path).map_err(|source| CsvError::Io { path: name.clone(), source })?;
    parse_matrix(file, &name)
}

/// Parses matrix text from any reader; `name` only labels error messages.
pub fn parse_matrix<R: Read>(reader: R, name: &str) -> Result<DenseMatrix, CsvError> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(::csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let malformed = |line: u64, message: String| CsvError::Malformed {
        path: name.to_string(),
        line,
        message,
    };

    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(malformed(
                    line,
                    format!("expected {c} columns, found {}", record.len()),
                ))
            }
            _ => {}
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                malformed(line, format!("column {}: cannot parse {field:?} as a number", k + 1))
            })?;
            if !v.is_finite() {
                return Err(malformed(line, format!("column {}: non-finite value", k + 1)));
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CsvError::Empty { path: name.to_string() })?;
    Ok(DenseMatrix::from_row_major(rows, cols, data).expect("shape and finiteness checked"))
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<(), CsvError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let io = |source| CsvError::Io { path: name.clone(), source };
    let mut file = File::create(path).map_err(io)?;
    file.write_all(format_matrix(m).as_bytes()).map_err(io)
}

/// Shortest round-trip formatting of every entry.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_spaces() {
        let text = "# a 2x2\n1, 2\n\n 3 ,4.5e0\n";
        let m = parse_matrix(text.as_bytes(), "t").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.as_slice(), &[1.0, 2.0, 3.0, 4.5]);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = parse_matrix("1,2\n3\n".as_bytes(), "g.csv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("g.csv:2:"), "{msg}");
    }

    #[test]
    fn bad_number_names_line() {
        let err = parse_matrix("1,2\n3,x\n".as_bytes(), "g.csv").unwrap_err();
        assert!(err.to_string().contains("g.csv:2:"), "{err}");
        assert!(matches!(parse_matrix("# nothing\n".as_bytes(), "e"), Err(CsvError::Empty { .. })));
        assert!(parse_matrix("nan,1\n".as_bytes(), "e").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_rows(&[vec![0.1, -1.0 / 3.0], vec![1e-300, 7.0]]).unwrap();
        let back = parse_matrix(format_matrix(&m).as_bytes(), "r").unwrap();
        assert_eq!(back.as_slice(), m.as_slice());
    }
}
