//! Seeded random matrices for tests, examples and simulations.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{DenseMatrix, Matrix, SparseMatrix};

/// The generator every seeded component uses.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from uniform `[-1, 1]`.
pub fn uniform_coefficient<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

pub fn random_dense(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng_from_seed(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    DenseMatrix::from_fn(rows, cols, |_, _| dist.sample(&mut rng))
}

/// Every entry is nonzero independently with probability `density`, with
/// values uniform on `[-1, 1]`.
pub fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = rng_from_seed(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    let density = density.clamp(0.0, 1.0);
    let mut triplets = Vec::new();
    for j in 0..cols {
        for i in 0..rows {
            if rng.gen_bool(density) {
                let v: f64 = dist.sample(&mut rng);
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &triplets).expect("indices are in range")
}

/// Dense storage for `density >= 1`, sparse otherwise.
pub fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> Matrix {
    if density >= 1.0 {
        Matrix::Dense(random_dense(rows, cols, seed))
    } else {
        Matrix::Sparse(random_sparse(rows, cols, density, seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        assert_eq!(random_dense(5, 5, 1), random_dense(5, 5, 1));
        assert_ne!(random_dense(5, 5, 1), random_dense(5, 5, 2));
        assert!(random_dense(20, 20, 3).as_slice().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn density_is_close() {
        let s = random_sparse(400, 250, 0.02, 7);
        assert!((s.density() - 0.02).abs() < 0.002);
        assert_eq!(random_sparse(10, 10, 0.0, 1).nnz(), 0);
        assert!(random_matrix(3, 3, 1.0, 1).nnz() == 9);
    }
}
