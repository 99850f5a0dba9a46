//! Dense and sparse blocks plus the numerical kernels built on them.

mod decomp;
mod dense;
mod matrix;
pub mod mtx;
mod partition;
mod product;
mod sparse;

pub use decomp::{
    condition_from_singular_values, condition_number, default_rel_tol, khatri_rao_columns,
    numerical_rank, rank, rank_from_singular_values, singular_values, solve_least_squares,
    solve_least_squares_with_tol, LeastSquares,
};
pub use dense::DenseMatrix;
pub use matrix::Matrix;
pub use partition::{partition_columns, PartitionedMatrix};
pub use product::{gram_flops, gram_product, GramProduct};
pub use sparse::SparseMatrix;
