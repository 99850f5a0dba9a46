use crate::error::Result;
use crate::linalg::{DenseMatrix, SparseMatrix};

/// A matrix operand held either densely or in compressed-column form.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols(),
            Matrix::Sparse(m) => m.cols(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.nnz(),
            Matrix::Sparse(m) => m.nnz(),
        }
    }

    pub fn density(&self) -> f64 {
        let size = self.rows() * self.cols();
        if size == 0 {
            0.0
        } else {
            self.nnz() as f64 / size as f64
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Sparse(_))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn column_block(&self, start: usize, width: usize) -> Matrix {
        match self {
            Matrix::Dense(m) => Matrix::Dense(m.column_block(start, width)),
            Matrix::Sparse(m) => Matrix::Sparse(m.column_block(start, width)),
        }
    }

    pub fn pad_columns(&self, cols: usize) -> Matrix {
        match self {
            Matrix::Dense(m) => {
                let mut out = DenseMatrix::zeros(m.rows(), cols);
                out.paste(0, 0, m);
                Matrix::Dense(out)
            }
            Matrix::Sparse(m) => Matrix::Sparse(m.pad_columns(cols)),
        }
    }

    /// `Σ coefficient_k * term_k`. The result is sparse only when every term is.
    pub fn linear_combination(terms: &[(f64, &Matrix)]) -> Result<Matrix> {
        if terms.iter().all(|(_, m)| m.is_sparse()) {
            let sparse: Vec<(f64, &SparseMatrix)> = terms
                .iter()
                .map(|(c, m)| match m {
                    Matrix::Sparse(s) => (*c, s),
                    Matrix::Dense(_) => unreachable!("checked above"),
                })
                .collect();
            return SparseMatrix::linear_combination(&sparse).map(Matrix::Sparse);
        }
        let (rows, cols) = terms
            .first()
            .map(|(_, m)| (m.rows(), m.cols()))
            .unwrap_or((0, 0));
        let mut acc = DenseMatrix::zeros(rows, cols);
        for (c, m) in terms {
            acc.axpy(*c, &m.to_dense())?;
        }
        Ok(Matrix::Dense(acc))
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(m: SparseMatrix) -> Self {
        Matrix::Sparse(m)
    }
}
