//! Polynomial-code reference scheme.
//!
//! Worker `i` evaluates `Ã(p) = Σ_j A_j p^j` and `B̃(p) = Σ_k B_k p^{k ka}` at
//! its node `p_i` and returns the single product `Ã(p_i)ᵀ B̃(p_i)`, whose
//! coefficient of `p^{j + k ka}` is `A_jᵀ B_k`. Any `ka * kb` results
//! determine all coefficients through a Vandermonde solve.

use rayon::prelude::*;

use crate::decoder::{CompletedProduct, RecoveredResult};
use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, gram_product, solve_least_squares_with_tol, DenseMatrix, Matrix, PartitionedMatrix,
};
use crate::subsets::{complement, SubsetSweep};

#[derive(Debug, Clone, PartialEq)]
pub struct PolyCodePlan {
    pub n: usize,
    pub ka: usize,
    pub kb: usize,
    pub points: Vec<f64>,
}

/// Nodes `1, 2, …, n`.
pub fn default_points(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

/// `n` equispaced nodes on `[-1, 1]`.
pub fn equispaced_points(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` Chebyshev nodes of the first kind on `[-1, 1]`.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

pub fn poly_plan(n: usize, ka: usize, kb: usize, points: Option<Vec<f64>>) -> Result<PolyCodePlan> {
    if ka == 0 || kb == 0 {
        return Err(Error::InvalidParameter("k_A and k_B must be positive".into()));
    }
    if n <= ka * kb {
        return Err(Error::NoStragglerMargin {
            n: n as u64,
            product: (ka * kb) as u64,
        });
    }
    let points = points.unwrap_or_else(|| default_points(n));
    if points.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} evaluation points for {n} workers",
            points.len()
        )));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("evaluation points must be finite".into()));
    }
    let mut sorted = points.clone();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(format!(
            "duplicate evaluation point {}",
            w[0]
        )));
    }
    Ok(PolyCodePlan { n, ka, kb, points })
}

impl PolyCodePlan {
    pub fn threshold(&self) -> usize {
        self.ka * self.kb
    }

    /// Coefficients worker `i` applies to `A_0 … A_{ka-1}`.
    pub fn a_coefficients(&self, worker: usize) -> Vec<f64> {
        let p = self.points[worker];
        (0..self.ka).map(|j| p.powi(j as i32)).collect()
    }

    /// Coefficients worker `i` applies to `B_0 … B_{kb-1}`.
    pub fn b_coefficients(&self, worker: usize) -> Vec<f64> {
        let p = self.points[worker];
        (0..self.kb).map(|k| p.powi((k * self.ka) as i32)).collect()
    }

    /// `|survivors| x ka*kb` Vandermonde matrix.
    pub fn vandermonde(&self, survivors: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(survivors.len(), self.threshold(), |r, d| {
            self.points[survivors[r]].powi(d as i32)
        })
    }

    /// Number of nonzero coefficients in each worker's `A` and `B` encodings.
    pub fn weights(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .map(|i| {
                let nz = |v: Vec<f64>| v.iter().filter(|c| **c != 0.0).count();
                (nz(self.a_coefficients(i)), nz(self.b_coefficients(i)))
            })
            .collect()
    }
}

/// Encoded `(Ã_i, B̃_i)` for every worker.
pub fn poly_encode(
    plan: &PolyCodePlan,
    a: &PartitionedMatrix,
    b: &PartitionedMatrix,
) -> Result<Vec<(Matrix, Matrix)>> {
    if a.block_count() != plan.ka || b.block_count() != plan.kb {
        return Err(Error::DimensionMismatch(format!(
            "polynomial code expects {} A blocks and {} B blocks, got {} and {}",
            plan.ka,
            plan.kb,
            a.block_count(),
            b.block_count()
        )));
    }
    (0..plan.n)
        .into_par_iter()
        .map(|i| {
            let ta: Vec<(f64, &Matrix)> = plan
                .a_coefficients(i)
                .into_iter()
                .zip(a.blocks())
                .collect();
            let tb: Vec<(f64, &Matrix)> = plan
                .b_coefficients(i)
                .into_iter()
                .zip(b.blocks())
                .collect();
            Ok((Matrix::linear_combination(&ta)?, Matrix::linear_combination(&tb)?))
        })
        .collect()
}

/// Each worker's single product, with its flop count.
pub fn poly_products(encoded: &[(Matrix, Matrix)]) -> Result<Vec<(CompletedProduct, u64)>> {
    encoded
        .par_iter()
        .enumerate()
        .map(|(worker, (a, b))| {
            let g = gram_product(a, b)?;
            Ok((
                CompletedProduct {
                    worker,
                    location: 0,
                    value: g.value,
                },
                g.flops,
            ))
        })
        .collect()
}

/// Interpolate from every supplied product (least squares when more than
/// `ka * kb` are given).
pub fn poly_decode(plan: &PolyCodePlan, products: &[CompletedProduct]) -> Result<RecoveredResult> {
    let tau = plan.threshold();
    let mut survivors: Vec<usize> = products.iter().map(|p| p.worker).collect();
    survivors.sort_unstable();
    survivors.dedup();
    if survivors.len() < tau {
        return Err(Error::TooFewSurvivors {
            got: survivors.len(),
            needed: tau,
        });
    }
    if let Some(&w) = survivors.iter().find(|w| **w >= plan.n) {
        return Err(Error::InvalidParameter(format!("no worker {w}")));
    }
    let (br, bc) = products[0].value.shape();
    let mut rhs = DenseMatrix::zeros(survivors.len(), br * bc);
    for (row, &w) in survivors.iter().enumerate() {
        let p = products
            .iter()
            .find(|p| p.worker == w)
            .expect("survivor comes from the product list");
        if p.value.shape() != (br, bc) {
            return Err(Error::DimensionMismatch("products differ in shape".into()));
        }
        rhs.as_mut_slice()[row * br * bc..(row + 1) * br * bc].copy_from_slice(p.value.as_slice());
    }
    let v = plan.vandermonde(&survivors);
    // Vandermonde systems are solved even when badly conditioned; the
    // condition number is reported alongside.
    let ls = solve_least_squares_with_tol(&v, &rhs, f64::EPSILON)?;
    let mut product = DenseMatrix::zeros(plan.ka * br, plan.kb * bc);
    for d in 0..tau {
        let (j, k) = (d % plan.ka, d / plan.ka);
        let block = DenseMatrix::from_row_major(br, bc, ls.solution.row(d).to_vec())?;
        product.paste(j * br, k * bc, &block);
    }
    Ok(RecoveredResult {
        product,
        residuals: vec![ls.residual],
        conditions: vec![condition_number(&v)],
    })
}

/// Worst condition number of the `(n - s) x ka*kb` Vandermonde systems
/// over straggler sets of size `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyConditioning {
    pub kappa_worst: f64,
    pub worst_stragglers: Vec<usize>,
    pub subsets: usize,
    pub exhaustive: bool,
}

pub fn poly_kappa_worst(plan: &PolyCodePlan, s: usize, seed: u64) -> Result<PolyConditioning> {
    if plan.n - s < plan.threshold() {
        return Err(Error::TooFewSurvivors {
            got: plan.n.saturating_sub(s),
            needed: plan.threshold(),
        });
    }
    let sweep = SubsetSweep::with_defaults(plan.n, s, seed);
    let (kappa, idx) = (0..sweep.len())
        .into_par_iter()
        .map(|i| {
            let survivors = complement(plan.n, &sweep.get(i));
            (condition_number(&plan.vandermonde(&survivors)), i)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(PolyConditioning {
        kappa_worst: kappa,
        worst_stragglers: sweep.get(idx),
        subsets: sweep.len(),
        exhaustive: sweep.exhaustive,
    })
}
