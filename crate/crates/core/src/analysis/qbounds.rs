//! Closed-form bounds on `Q`, the number of products after which any
//! progress pattern is decodable.

use serde::Serialize;

use crate::scheme::DerivedParams;

/// Largest number of products the workers can return while some class
/// still has at most `kappa - 1` available equations.
///
/// With `c = n / ℓ` workers per location and `kappa - 1 = c c1 + c2`,
/// `η(κ) = n(ℓ-1)/2 + c Σ_{i<c1} (ℓ-i) + c2 (ℓ-c1)`.
pub fn eta_max_products(derived: &DerivedParams, kappa: usize) -> u64 {
    let (c1, c2) = split(derived, kappa);
    let l = derived.tasks_per_worker as u64;
    let n = derived.n as u64;
    let c = derived.groups as u64;
    let head = n * (l - 1) / 2;
    let full: u64 = (0..c1 as u64).map(|i| l - i).sum();
    head + c * full + c2 as u64 * (l - c1 as u64)
}

fn split(derived: &DerivedParams, kappa: usize) -> (usize, usize) {
    let c = derived.groups;
    let k = kappa.saturating_sub(1);
    (k / c, k % c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QBounds {
    pub q_lb: u64,
    pub q_ub: u64,
    pub eta_lb: u64,
    pub eta_ub: u64,
    pub c1_lb: usize,
    pub c2_lb: usize,
    pub c1_ub: usize,
    pub c2_ub: usize,
}

impl QBounds {
    pub fn is_tight(&self) -> bool {
        self.q_lb == self.q_ub
    }
}

/// `Q_ub = η(τ) + 1` and `Q_lb = η(ka kb) + ⌈s_m y / ka⌉ + 1`.
pub fn q_bounds(derived: &DerivedParams) -> QBounds {
    let k = derived.class_unknowns();
    let eta_ub = eta_max_products(derived, derived.threshold);
    let extra = (derived.max_stragglers * derived.weight_reduction).div_ceil(derived.ka) as u64;
    let eta_lb = eta_max_products(derived, k) + extra;
    let (c1_lb, c2_lb) = split(derived, k);
    let (c1_ub, c2_ub) = split(derived, derived.threshold);
    QBounds {
        q_lb: eta_lb + 1,
        q_ub: eta_ub + 1,
        eta_lb,
        eta_ub,
        c1_lb,
        c2_lb,
        c1_ub,
        c2_ub,
    }
}
