//! Coded distributed matrix multiplication for sparse inputs and partial stragglers.
//!
//! The central node computes `AᵀB` by handing each of `n` workers a short,
//! ordered list of block products. Most `A` blocks are sent uncoded; the rest
//! are random combinations of a few members of one *class* of `A` blocks, and
//! every worker holds one low-weight combination of `B` blocks. Because each
//! finished block product is reported immediately, slow workers still
//! contribute, and the low encoding weight keeps sparse inputs sparse.
//!
//! Module map:
//!
//! * [`scheme`] validates parameters and derives every scalar of the scheme.
//! * [`encoding`] builds the per-worker assignment plan and materializes payloads.
//! * [`linalg`] holds dense/sparse blocks, products, rank and least-squares kernels.
//! * [`generator`] builds the per-class generator matrices and the Khatri-Rao systems.
//! * [`decoder`] tracks partial progress and recovers `AᵀB`.
//! * [`simulator`] replays worker schedules under speed and cost models.
//! * [`analysis`] computes Q bounds, the brute-force Q oracle, conditioning
//!   sweeps, the sparsity cost model and the structural property verifiers.
//! * [`baseline`] is a polynomial-code reference point.
//! * [`cli`] wires everything into the `coded-matmul` binary.

pub mod analysis;
pub mod baseline;
pub mod cli;
pub mod decoder;
pub mod encoding;
pub mod error;
pub mod generator;
pub mod linalg;
pub mod plan_file;
pub mod scheme;
pub mod simulator;
pub mod subsets;
pub mod synthetic;

pub use error::{Error, Result};
pub use scheme::{derive_params, DerivedParams, SchemeParams};
