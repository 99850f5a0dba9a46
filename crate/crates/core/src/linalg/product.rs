use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix, SparseMatrix};

/// `A_iᵀ B_j` together with the floating point operations spent on it.
#[derive(Debug, Clone, PartialEq)]
pub struct GramProduct {
    pub value: DenseMatrix,
    /// Twice the number of multiply-adds performed.
    pub flops: u64,
}

fn check_rows(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "gram product needs equal row counts, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    Ok(())
}

/// Compute `aᵀ b`. Uses the sparse kernel when both operands are sparse.
pub fn gram_product(a: &Matrix, b: &Matrix) -> Result<GramProduct> {
    check_rows(a, b)?;
    Ok(match (a, b) {
        (Matrix::Sparse(a), Matrix::Sparse(b)) => sparse_gram(a, b),
        (Matrix::Sparse(a), Matrix::Dense(b)) => sparse_dense_gram(a, b),
        (Matrix::Dense(a), Matrix::Sparse(b)) => {
            let t = sparse_dense_gram(b, a);
            GramProduct {
                value: t.value.transpose(),
                flops: t.flops,
            }
        }
        (Matrix::Dense(a), Matrix::Dense(b)) => dense_gram(a, b),
    })
}

/// Flops [`gram_product`] would report, without forming the product.
pub fn gram_flops(a: &Matrix, b: &Matrix) -> Result<u64> {
    check_rows(a, b)?;
    let row_counts = |m: &Matrix| -> Vec<u64> {
        match m {
            Matrix::Sparse(s) => {
                let mut counts = vec![0u64; s.rows()];
                for &r in s.row_indices() {
                    counts[r] += 1;
                }
                counts
            }
            Matrix::Dense(d) => (0..d.rows())
                .map(|i| d.row(i).iter().filter(|v| **v != 0.0).count() as u64)
                .collect(),
        }
    };
    Ok(match (a, b) {
        (Matrix::Dense(a), Matrix::Dense(b)) => 2 * (a.rows() * a.cols() * b.cols()) as u64,
        (Matrix::Sparse(s), Matrix::Dense(d)) | (Matrix::Dense(d), Matrix::Sparse(s)) => {
            2 * s.nnz() as u64 * d.cols() as u64
        }
        _ => {
            let ra = row_counts(a);
            let rb = row_counts(b);
            2 * ra.iter().zip(&rb).map(|(x, y)| x * y).sum::<u64>()
        }
    })
}

fn dense_gram(a: &DenseMatrix, b: &DenseMatrix) -> GramProduct {
    let (t, wa, wb) = (a.rows(), a.cols(), b.cols());
    let mut out = DenseMatrix::zeros(wa, wb);
    let data = out.as_mut_slice();
    for k in 0..t {
        let arow = a.row(k);
        let brow = b.row(k);
        for (i, &av) in arow.iter().enumerate() {
            let dst = &mut data[i * wb..(i + 1) * wb];
            for (o, &bv) in dst.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
    GramProduct {
        value: out,
        flops: 2 * (t * wa * wb) as u64,
    }
}

fn sparse_dense_gram(a: &SparseMatrix, b: &DenseMatrix) -> GramProduct {
    let wb = b.cols();
    let mut out = DenseMatrix::zeros(a.cols(), wb);
    let data = out.as_mut_slice();
    for i in 0..a.cols() {
        let dst = &mut data[i * wb..(i + 1) * wb];
        for (k, av) in a.column(i) {
            for (o, &bv) in dst.iter_mut().zip(b.row(k)) {
                *o += av * bv;
            }
        }
    }
    GramProduct {
        value: out,
        flops: 2 * a.nnz() as u64 * wb as u64,
    }
}

// Output column j is Σ_k b[k, j] * (row k of a), accumulated densely.
fn sparse_gram(a: &SparseMatrix, b: &SparseMatrix) -> GramProduct {
    let at = a.transpose();
    let wa = a.cols();
    let wb = b.cols();
    let mut out = DenseMatrix::zeros(wa, wb);
    let mut scratch = vec![0.0; wa];
    let mut touched: Vec<usize> = Vec::new();
    let mut seen = vec![false; wa];
    let mut madds = 0u64;
    for j in 0..wb {
        for (k, bv) in b.column(j) {
            for (i, av) in at.column(k) {
                if !seen[i] {
                    seen[i] = true;
                    touched.push(i);
                }
                scratch[i] += av * bv;
                madds += 1;
            }
        }
        for &i in &touched {
            out.set(i, j, scratch[i]);
            scratch[i] = 0.0;
            seen[i] = false;
        }
        touched.clear();
    }
    GramProduct {
        value: out,
        flops: 2 * madds,
    }
}
