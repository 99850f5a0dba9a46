//! Matrix Market reader and writer (real `coordinate` and `array` formats).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(1, "expected a %%MatrixMarket matrix header"));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(Error::parse(1, format!("unknown format {other:?}"))),
    };
    match words[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(Error::parse(1, format!("unsupported field {other:?}"))),
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::parse(1, format!("unsupported symmetry {other:?}"))),
    };
    Ok((layout, symmetry))
}

fn parse_number<T: std::str::FromStr>(word: Option<&str>, line: usize) -> Result<T> {
    let word = word.ok_or_else(|| Error::parse(line, "missing value"))?;
    word.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {word:?}")))
}

/// Read a Matrix Market stream. Coordinate files become sparse matrices and
/// array files dense ones.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Matrix> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::parse(1, "empty file")),
    };
    let (layout, symmetry) = parse_header(&header)?;

    let mut body = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        body.push((idx + 1, trimmed.to_string()));
    }
    let mut body = body.into_iter();
    let (size_line, size) = body
        .next()
        .ok_or_else(|| Error::parse(2, "missing size line"))?;
    let mut words = size.split_whitespace();
    let rows: usize = parse_number(words.next(), size_line)?;
    let cols: usize = parse_number(words.next(), size_line)?;

    match layout {
        Layout::Coordinate => {
            let entries: usize = parse_number(words.next(), size_line)?;
            let mut triplets = Vec::with_capacity(entries);
            for (line_no, line) in body.by_ref().take(entries) {
                let mut w = line.split_whitespace();
                let r: usize = parse_number(w.next(), line_no)?;
                let c: usize = parse_number(w.next(), line_no)?;
                let v: f64 = parse_number(w.next(), line_no)?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(Error::parse(line_no, format!("index ({r}, {c}) out of range")));
                }
                triplets.push((r - 1, c - 1, v));
                if symmetry == Symmetry::Symmetric && r != c {
                    triplets.push((c - 1, r - 1, v));
                }
            }
            if triplets.len() < entries {
                return Err(Error::parse(size_line, "fewer entries than declared"));
            }
            Ok(Matrix::Sparse(SparseMatrix::from_triplets(rows, cols, &triplets)?))
        }
        Layout::Array => {
            let mut out = DenseMatrix::zeros(rows, cols);
            // Column-major; symmetric files list only the lower triangle.
            let mut slots = (0..cols).flat_map(|j| {
                let start = if symmetry == Symmetry::Symmetric { j } else { 0 };
                (start..rows).map(move |i| (i, j))
            });
            for (line_no, line) in body {
                let v: f64 = parse_number(line.split_whitespace().next(), line_no)?;
                let (i, j) = slots
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "more values than the declared size"))?;
                out.set(i, j, v);
                if symmetry == Symmetry::Symmetric {
                    out.set(j, i, v);
                }
            }
            if slots.next().is_some() {
                return Err(Error::parse(size_line, "fewer values than the declared size"));
            }
            Ok(Matrix::Dense(out))
        }
    }
}

/// Write `m` as `coordinate real general` when sparse and `array real
/// general` when dense. Values use 17 significant digits.
pub fn write_matrix_market<W: Write>(mut writer: W, m: &Matrix) -> Result<()> {
    match m {
        Matrix::Sparse(s) => {
            writeln!(writer, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(writer, "{} {} {}", s.rows(), s.cols(), s.nnz())?;
            for j in 0..s.cols() {
                for (i, v) in s.column(j) {
                    writeln!(writer, "{} {} {:.16e}", i + 1, j + 1, v)?;
                }
            }
        }
        Matrix::Dense(d) => {
            writeln!(writer, "%%MatrixMarket matrix array real general")?;
            writeln!(writer, "{} {}", d.rows(), d.cols())?;
            for j in 0..d.cols() {
                for i in 0..d.rows() {
                    writeln!(writer, "{:.16e}", d.get(i, j))?;
                }
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

pub fn save_matrix_market(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_matrix_market(BufWriter::new(File::create(path)?), m)
}
