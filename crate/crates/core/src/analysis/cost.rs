//! Analytic worker cost under i.i.d. sparsity.
//!
//! An `t x r` matrix with density `η` split into column blocks of width
//! `r / k` gives blocks of density about `η`; a linear combination of `w`
//! of them has density about `min(1, w η)`. The product of a `t x c_a` and a
//! `t x c_b` block then costs `2 t c_a c_b d_a d_b` flops.

use num_integer::Integer;
use serde::Serialize;

use crate::scheme::DerivedParams;

pub fn effective_density(weight: usize, density: f64) -> f64 {
    (weight as f64 * density).min(1.0)
}

pub fn product_flops(t: f64, ca: f64, cb: f64, da: f64, db: f64) -> f64 {
    2.0 * t * ca * cb * da * db
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityCost {
    /// Flops of each location of one worker's list.
    pub per_location: Vec<f64>,
    pub proposed_worker_flops: f64,
    /// One product of `r/ka` by `w/kb` blocks, each a dense-weight combination.
    pub dense_worker_flops: f64,
    pub ratio: f64,
    /// In the small-density limit the ratio is exactly
    /// `ζ (p + ℓ_c (ka - y)) / Δ`; stored reduced.
    pub limit_ratio: (u64, u64),
}

/// Cost of a worker of the proposed scheme against a dense-encoding scheme
/// on `t x r` and `t x w` inputs of density `density`.
pub fn sparsity_cost_model(derived: &DerivedParams, t: usize, r: usize, w: usize, density: f64) -> SparsityCost {
    let d = derived;
    let ca = r as f64 / d.a_blocks as f64;
    let cb = w as f64 / d.kb as f64;
    let db = effective_density(d.b_weight, density);
    let t = t as f64;
    let per_location: Vec<f64> = (0..d.tasks_per_worker)
        .map(|loc| {
            let wa = if loc < d.uncoded_per_worker {
                1
            } else {
                d.coded_a_weight()
            };
            product_flops(t, ca, cb, effective_density(wa, density), db)
        })
        .collect();
    let proposed: f64 = per_location.iter().sum();
    let dense = product_flops(
        t,
        r as f64 / d.ka as f64,
        cb,
        effective_density(d.ka, density),
        effective_density(d.kb, density),
    );
    let num = (d.b_weight * (d.uncoded_per_worker + d.coded_per_worker * d.coded_a_weight())) as u64;
    let den = (d.a_blocks * d.kb) as u64;
    let g = num.gcd(&den);
    SparsityCost {
        per_location,
        proposed_worker_flops: proposed,
        dense_worker_flops: dense,
        ratio: proposed / dense,
        limit_ratio: (num / g, den / g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{derive_params, SchemeParams};
    use proptest::prelude::*;

    fn derived(n: usize, ka: usize, kb: usize, x: usize) -> DerivedParams {
        derive_params(&SchemeParams::new(n, ka, kb, x)).unwrap()
    }

    #[test]
    fn one_third_for_twelve_workers() {
        let c = sparsity_cost_model(&derived(12, 3, 3, 0), 1000, 1200, 900, 0.01);
        assert_eq!(c.limit_ratio, (1, 3));
        assert!((c.ratio - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dense_inputs_cost_the_same() {
        // ℓ blocks of width r/Δ_A add up to one block of width r/ka.
        let c = sparsity_cost_model(&derived(12, 3, 3, 0), 100, 120, 90, 1.0);
        assert!((c.ratio - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn zero_relaxation_closed_form(ka in 1usize..6, kb in 1usize..6, extra in 1usize..12) {
            let n = ka * kb + extra;
            let d = derived(n, ka, kb, 0);
            let c = sparsity_cost_model(&d, 500, 60 * d.a_blocks, 30 * kb, 1e-4);
            let zeta = d.b_weight as f64;
            let closed = zeta / n as f64 * (1.0 + extra as f64 / kb as f64);
            prop_assert!((c.ratio - closed).abs() <= 1e-9 * closed);
            let (a, b) = c.limit_ratio;
            prop_assert!((a as f64 / b as f64 - closed).abs() <= 1e-12);
        }
    }
}
