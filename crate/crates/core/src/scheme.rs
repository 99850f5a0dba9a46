//! Parameter validation and the scalar quantities every other module uses.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted value for `n`, `k_A` and `k_B`.
pub const MAX_PARAMETER: u64 = 1_000_000;

/// User-facing scheme parameters.
///
/// Each worker stores a `1/ka` fraction of `A` and a `1/kb` fraction of `B`.
/// `x` relaxes the recovery threshold from `ka * kb` to `ka * kb + x` in
/// exchange for lighter `A` encodings. `kb = 1` is the matrix-vector case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    pub ka: usize,
    pub kb: usize,
    pub x: usize,
    pub seed: u64,
}

impl SchemeParams {
    pub fn new(n: usize, ka: usize, kb: usize, x: usize) -> Self {
        Self {
            n,
            ka,
            kb,
            x,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Every scalar the assignment algorithm derives from [`SchemeParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub n: usize,
    pub ka: usize,
    pub kb: usize,
    pub x: usize,
    /// `s_m = n - ka*kb`, the most full stragglers any scheme can absorb.
    pub max_stragglers: usize,
    /// `s = s_m - x`, the number of stragglers this plan is built for.
    pub stragglers: usize,
    /// `y = floor(ka*x / s_m)`; coded `A` blocks combine `ka - y` members.
    pub weight_reduction: usize,
    /// `Δ_A = lcm(n, ka)` block-columns of `A`.
    pub a_blocks: usize,
    /// `Δ_B = kb` block-columns of `B`.
    pub b_blocks: usize,
    /// `Δ = Δ_A * Δ_B` unknown block products.
    pub unknowns: usize,
    /// `p = Δ / n` uncoded `A` blocks at the top of every worker.
    pub uncoded_per_worker: usize,
    /// `ℓ = Δ_A / ka` tasks (and classes) per worker.
    pub tasks_per_worker: usize,
    /// `ℓ_c = ℓ - p` coded `A` blocks per worker.
    pub coded_per_worker: usize,
    /// `c = n / ℓ` worker groups.
    pub groups: usize,
    /// `Δ_A / n`, the block shift between consecutive workers.
    pub shift: usize,
    /// `ω = 1 + ceil(s_m / kb)`.
    pub type_window: usize,
    /// `ζ = 1 + kb - ceil(kb / ω)`, the weight of every coded `B` block.
    pub b_weight: usize,
    /// `τ = ka*kb + x`, the recovery threshold.
    pub threshold: usize,
    /// `σ = kb + s_m`, appearances of each `A` block when `x = 0`.
    pub appearances: usize,
}

impl DerivedParams {
    /// Number of `A` members combined in every coded `A` block.
    pub fn coded_a_weight(&self) -> usize {
        self.ka - self.weight_reduction
    }

    /// Number of unknowns recovered per class, `ka * kb`.
    pub fn class_unknowns(&self) -> usize {
        self.ka * self.kb
    }

    /// Replace `ζ`. Used to probe what breaks when `B` is encoded too lightly.
    pub fn with_b_weight(mut self, zeta: usize) -> Result<Self> {
        if zeta == 0 || zeta > self.kb {
            return Err(Error::InvalidParameter(format!(
                "B weight {zeta} must lie in [1, {}]",
                self.kb
            )));
        }
        self.b_weight = zeta;
        Ok(self)
    }

    /// Smallest `ζ` for which every `kb x kb` submatrix of each `R_i` stays
    /// nonsingular: the minimum over `m in 1..=kb` of `1 + m - ceil(m / ω)`.
    pub fn minimal_b_weight(kb: usize, type_window: usize) -> usize {
        (1..=kb)
            .map(|m| 1 + m - m.div_ceil(type_window))
            .max()
            .unwrap_or(1)
    }
}

fn checked(value: Option<u64>, what: &str) -> Result<u64> {
    value.ok_or_else(|| Error::InvalidParameter(format!("{what} overflows 64 bits")))
}

/// Validate `params` and derive the scheme's scalars.
pub fn derive_params(params: &SchemeParams) -> Result<DerivedParams> {
    let (n, ka, kb, x) = (
        params.n as u64,
        params.ka as u64,
        params.kb as u64,
        params.x as u64,
    );
    for (name, value) in [("n", n), ("k_A", ka), ("k_B", kb)] {
        if value == 0 {
            return Err(Error::InvalidParameter(format!("{name} must be positive")));
        }
        if value > MAX_PARAMETER {
            return Err(Error::InvalidParameter(format!(
                "{name} = {value} exceeds the supported maximum {MAX_PARAMETER}"
            )));
        }
    }
    let product = checked(ka.checked_mul(kb), "k_A * k_B")?;
    if n <= product {
        return Err(Error::NoStragglerMargin { n, product });
    }
    let max_stragglers = n - product;
    if x >= max_stragglers {
        return Err(Error::DegenerateRelaxation {
            x,
            max: max_stragglers - 1,
        });
    }

    let gcd = n.gcd(&ka);
    let a_blocks = checked((n / gcd).checked_mul(ka), "lcm(n, k_A)")?;
    let unknowns = checked(a_blocks.checked_mul(kb), "Δ_A * Δ_B")?;
    let uncoded = unknowns / n;
    let tasks = a_blocks / ka;
    let groups = n / tasks;
    debug_assert_eq!(uncoded * n, unknowns);
    debug_assert_eq!(groups * tasks, n);
    debug_assert_eq!(groups, gcd);

    let weight_reduction = ka * x / max_stragglers;
    let type_window = 1 + max_stragglers.div_ceil(kb);
    let b_weight = 1 + kb - kb.div_ceil(type_window);

    let to_usize = |v: u64| v as usize;
    Ok(DerivedParams {
        n: params.n,
        ka: params.ka,
        kb: params.kb,
        x: params.x,
        max_stragglers: to_usize(max_stragglers),
        stragglers: to_usize(max_stragglers - x),
        weight_reduction: to_usize(weight_reduction),
        a_blocks: to_usize(a_blocks),
        b_blocks: params.kb,
        unknowns: to_usize(unknowns),
        uncoded_per_worker: to_usize(uncoded),
        tasks_per_worker: to_usize(tasks),
        coded_per_worker: to_usize(tasks - uncoded),
        groups: to_usize(groups),
        shift: to_usize(a_blocks / n),
        type_window: to_usize(type_window),
        b_weight: to_usize(b_weight),
        threshold: to_usize(product + x),
        appearances: to_usize(kb + max_stragglers),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn derive(n: usize, ka: usize, kb: usize, x: usize) -> DerivedParams {
        derive_params(&SchemeParams::new(n, ka, kb, x)).unwrap()
    }

    #[test]
    fn n24_optimal_threshold() {
        let d = derive(24, 4, 5, 0);
        assert_eq!(d.a_blocks, 24);
        assert_eq!(d.unknowns, 120);
        assert_eq!(d.tasks_per_worker, 6);
        assert_eq!(d.groups, 4);
        assert_eq!(d.uncoded_per_worker, 5);
        assert_eq!(d.max_stragglers, 4);
        assert_eq!(d.threshold, 20);
        assert_eq!(d.type_window, 2);
        assert_eq!(d.b_weight, 3);
        assert_eq!(d.weight_reduction, 0);
        assert_eq!(d.coded_a_weight(), 4);
    }

    #[test]
    fn n24_relaxed() {
        let d = derive(24, 4, 5, 2);
        assert_eq!(d.weight_reduction, 2);
        assert_eq!(d.coded_a_weight(), 2);
        assert_eq!(d.b_weight, 3);
        assert_eq!(d.threshold, 22);
        assert_eq!(d.stragglers, 2);
    }

    #[test]
    fn twelve_workers_thirds() {
        let d = derive(12, 3, 3, 0);
        assert_eq!(d.a_blocks, 12);
        assert_eq!(d.tasks_per_worker, 4);
        assert_eq!(d.groups, 3);
        assert_eq!(d.uncoded_per_worker, 3);
        assert_eq!(d.coded_per_worker, 1);
        assert_eq!(d.max_stragglers, 3);
        assert_eq!(d.b_weight, 2);
        assert_eq!(d.appearances, 6);
    }

    #[test]
    fn five_workers_halves() {
        let d = derive(5, 2, 2, 0);
        assert_eq!(d.a_blocks, 10);
        assert_eq!(d.unknowns, 20);
        assert_eq!(d.tasks_per_worker, 5);
        assert_eq!(d.uncoded_per_worker, 4);
        assert_eq!(d.coded_per_worker, 1);
        assert_eq!(d.max_stragglers, 1);
        assert_eq!(d.threshold, 4);
        assert_eq!(d.b_weight, 2);
    }

    #[test]
    fn eight_workers_relaxed() {
        let d = derive(8, 3, 2, 1);
        assert_eq!(d.max_stragglers, 2);
        assert_eq!(d.weight_reduction, 1);
        assert_eq!(d.threshold, 7);
    }

    #[test]
    fn matrix_vector_is_legal() {
        let d = derive(5, 3, 1, 1);
        assert_eq!(d.b_weight, 1);
        assert_eq!(d.coded_a_weight(), 2);
        assert_eq!(d.coded_per_worker, 2);
    }

    #[test]
    fn rejects_missing_margin() {
        let err = derive_params(&SchemeParams::new(6, 3, 2, 0)).unwrap_err();
        assert!(matches!(err, Error::NoStragglerMargin { n: 6, product: 6 }));
        assert!(err.to_string().contains("no straggler margin"));
    }

    #[test]
    fn rejects_degenerate_relaxation() {
        // s_m = 4, so x = 4 would leave s = 0.
        let err = derive_params(&SchemeParams::new(24, 4, 5, 4)).unwrap_err();
        assert!(matches!(err, Error::DegenerateRelaxation { x: 4, max: 3 }));
        assert!(err.to_string().contains("degenerate relaxation"));
    }

    #[test]
    fn rejects_zero_and_huge() {
        assert!(derive_params(&SchemeParams::new(0, 1, 1, 0)).is_err());
        assert!(derive_params(&SchemeParams::new(5, 0, 1, 0)).is_err());
        assert!(derive_params(&SchemeParams::new(2_000_000, 1, 1, 0)).is_err());
    }

    #[test]
    fn b_weight_override_is_bounded() {
        let d = derive(12, 3, 3, 0);
        assert_eq!(d.with_b_weight(1).unwrap().b_weight, 1);
        assert!(d.with_b_weight(0).is_err());
        assert!(d.with_b_weight(4).is_err());
    }

    proptest! {
        #[test]
        fn derived_quantities_are_consistent(
            ka in 1usize..6, kb in 1usize..6, extra in 1usize..12, xs in 0usize..100,
        ) {
            let n = ka * kb + extra;
            let x = xs % extra;
            let d = derive(n, ka, kb, x);
            prop_assert_eq!(d.n * d.uncoded_per_worker, d.unknowns);
            prop_assert_eq!(d.tasks_per_worker * d.groups, d.n);
            prop_assert_eq!(d.groups, n.gcd(&ka));
            prop_assert_eq!(d.uncoded_per_worker + d.coded_per_worker, d.tasks_per_worker);
            prop_assert!(d.coded_per_worker >= 1);
            prop_assert!(d.b_weight >= 1 && d.b_weight <= kb);
            prop_assert!(d.weight_reduction < ka);
            prop_assert_eq!(d.b_weight, DerivedParams::minimal_b_weight(kb, d.type_window));
            if x == 0 {
                prop_assert_eq!(d.weight_reduction, 0);
                prop_assert_eq!(d.threshold, ka * kb);
            }
        }
    }
}
