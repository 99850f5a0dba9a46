use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Compressed sparse column matrix.
///
/// Row indices are strictly increasing inside each column and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by_key(|a| (a.1, a.0));

        let mut col_ptr = vec![0; cols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            // Drop a previous entry that summed to zero before moving on.
            if values.last() == Some(&0.0) {
                values.pop();
                row_idx.pop();
                col_ptr[last.expect("entry exists").1 + 1] -= 1;
            }
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
            last = Some((r, c));
        }
        if values.last() == Some(&0.0) {
            values.pop();
            row_idx.pop();
            col_ptr[last.expect("entry exists").1 + 1] -= 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(m.cols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                let v = m.get(i, j);
                if v != 0.0 {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> f64 {
        if self.rows * self.cols == 0 {
            0.0
        } else {
            self.nnz() as f64 / (self.rows * self.cols) as f64
        }
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterator over `(row, value)` of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Copy of columns `start..start + width`.
    pub fn column_block(&self, start: usize, width: usize) -> Self {
        let lo = self.col_ptr[start];
        let hi = self.col_ptr[start + width];
        Self {
            rows: self.rows,
            cols: width,
            col_ptr: self.col_ptr[start..=start + width]
                .iter()
                .map(|p| p - lo)
                .collect(),
            row_idx: self.row_idx[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.rows + 1];
        for &r in &self.row_idx {
            counts[r + 1] += 1;
        }
        for r in 0..self.rows {
            counts[r + 1] += counts[r];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                let slot = next[i];
                row_idx[slot] = j;
                values[slot] = v;
                next[i] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// `Σ coefficient_k * term_k` over same-shape operands.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> Result<Self> {
        let (rows, cols) = match terms.first() {
            Some((_, m)) => (m.rows, m.cols),
            None => return Err(Error::InvalidParameter("empty combination".into())),
        };
        if terms.iter().any(|(_, m)| m.rows != rows || m.cols != cols) {
            return Err(Error::DimensionMismatch(
                "linear combination of differently shaped blocks".into(),
            ));
        }
        let mut acc = vec![0.0; rows];
        let mut touched = vec![false; rows];
        let mut pattern: Vec<usize> = Vec::new();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..cols {
            for (coef, m) in terms {
                for (i, v) in m.column(j) {
                    if !touched[i] {
                        touched[i] = true;
                        pattern.push(i);
                    }
                    acc[i] += coef * v;
                }
            }
            pattern.sort_unstable();
            for &i in &pattern {
                if acc[i] != 0.0 {
                    row_idx.push(i);
                    values.push(acc[i]);
                }
                acc[i] = 0.0;
                touched[i] = false;
            }
            pattern.clear();
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Append zero columns on the right.
    pub fn pad_columns(&self, cols: usize) -> Self {
        let mut out = self.clone();
        let end = *out.col_ptr.last().expect("col_ptr is never empty");
        out.col_ptr.resize(cols + 1, end);
        out.cols = cols;
        out
    }

    #[cfg(test)]
    pub(crate) fn is_well_formed(&self) -> bool {
        self.col_ptr.len() == self.cols + 1
            && (0..self.cols).all(|j| {
                let col = &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]];
                col.windows(2).all(|w| w[0] < w[1]) && col.iter().all(|&r| r < self.rows)
            })
            && self.values.iter().all(|v| *v != 0.0)
    }
}
