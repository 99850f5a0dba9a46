//! Brute-force `Q` for small plans.
//!
//! `Q` is one more than the largest total progress that still leaves some
//! class rank deficient. Two searches are offered:
//!
//! * [`OracleMode::ClassSubsets`] fixes a class `m` and a set `S` of workers
//!   whose class-`m` product is available. Workers in `S` may finish their
//!   whole list, the others stop just before class `m`. The answer is the
//!   best value over all rank-deficient `(m, S)`.
//! * [`OracleMode::ExhaustiveLedgers`] walks every progress vector in
//!   `{0..=ℓ}^n`. It is only practical for tiny plans and serves as a
//!   cross-check of the subset search.
//!
//! Rank decisions that change when the tolerance is tightened tenfold are
//! counted as borderline.

use serde::Serialize;

use crate::analysis::qbounds::q_bounds;
use crate::decoder::ProgressLedger;
use crate::encoding::{ATask, EncodingPlan};
use crate::error::{Error, Result};
use crate::generator::{build_class_systems, ClassSystem};
use crate::linalg::{default_rel_tol, rank_from_singular_values, singular_values};

pub const MAX_SUBSET_WORKERS: usize = 20;
pub const MAX_LEDGERS: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    ClassSubsets,
    ExhaustiveLedgers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub q: u64,
    pub mode: OracleMode,
    /// A rank-deficient progress vector with `q - 1` products.
    pub worst_counts: Vec<usize>,
    pub worst_class: usize,
    pub rank_evaluations: usize,
    pub borderline: usize,
}

struct RankProbe {
    evaluations: usize,
    borderline: usize,
}

impl RankProbe {
    fn full_rank(&mut self, sys: &ClassSystem, cols: &[usize]) -> bool {
        let k = sys.unknowns();
        if cols.len() < k {
            return false;
        }
        self.evaluations += 1;
        let g = sys.g.select_columns(cols);
        let sv = singular_values(&g);
        let tol = default_rel_tol(g.rows(), g.cols());
        let r = rank_from_singular_values(&sv, tol);
        if r != rank_from_singular_values(&sv, tol / 10.0) {
            self.borderline += 1;
        }
        r == k
    }
}

fn mask_members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn q_exact_oracle(plan: &EncodingPlan, mode: OracleMode) -> Result<OracleResult> {
    match mode {
        OracleMode::ClassSubsets => class_subsets(plan),
        OracleMode::ExhaustiveLedgers => exhaustive_ledgers(plan),
    }
}

fn class_subsets(plan: &EncodingPlan) -> Result<OracleResult> {
    let n = plan.n();
    if n > MAX_SUBSET_WORKERS {
        return Err(Error::TooLarge(format!(
            "subset oracle handles at most {MAX_SUBSET_WORKERS} workers, got {n}"
        )));
    }
    let l = plan.tasks_per_worker();
    let systems = build_class_systems(plan);
    let mut probe = RankProbe {
        evaluations: 0,
        borderline: 0,
    };
    let mut best: Option<(u64, usize, u64)> = None;
    for sys in &systems {
        let present: Vec<usize> = (0..n).filter(|&i| sys.locations[i] < l).collect();
        let base: u64 = sys.locations.iter().map(|&loc| loc.min(l) as u64).sum();
        let gain = |mask: u64| -> u64 {
            mask_members(mask, n)
                .iter()
                .map(|&i| (l - sys.locations[i]) as u64)
                .sum()
        };
        let present_mask: u64 = present.iter().map(|i| 1u64 << i).sum();
        let mut masks: Vec<(u64, u64)> = (0..1u64 << n)
            .filter(|m| m & !present_mask == 0)
            .map(|m| (base + gain(m), m))
            .collect();
        masks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (value, mask) in masks {
            if best.is_some_and(|(v, _, _)| value <= v) {
                break;
            }
            if !probe.full_rank(sys, &mask_members(mask, n)) {
                best = Some((value, sys.class, mask));
                break;
            }
        }
    }
    let (value, class, mask) = best.ok_or_else(|| {
        Error::InvalidParameter("plan has no classes to search".into())
    })?;
    let sys = &systems[class];
    let worst_counts = (0..n)
        .map(|i| {
            if mask >> i & 1 == 1 {
                l
            } else {
                sys.locations[i].min(l)
            }
        })
        .collect();
    Ok(OracleResult {
        q: value + 1,
        mode: OracleMode::ClassSubsets,
        worst_counts,
        worst_class: class,
        rank_evaluations: probe.evaluations,
        borderline: probe.borderline,
    })
}

fn exhaustive_ledgers(plan: &EncodingPlan) -> Result<OracleResult> {
    let n = plan.n();
    let l = plan.tasks_per_worker();
    let ledgers = (l as u64 + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
    if n > MAX_SUBSET_WORKERS || ledgers > MAX_LEDGERS {
        return Err(Error::TooLarge(format!(
            "{ledgers} progress vectors exceed the limit of {MAX_LEDGERS}"
        )));
    }
    let systems = build_class_systems(plan);
    let mut probe = RankProbe {
        evaluations: 0,
        borderline: 0,
    };
    let mut cache: Vec<Vec<Option<bool>>> = vec![vec![None; 1 << n]; systems.len()];
    let mut counts = vec![0usize; n];
    let mut best: Option<(u64, usize, Vec<usize>)> = None;
    loop {
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
            for sys in &systems {
                let mask = (0..n)
                    .filter(|&i| counts[i] > sys.locations[i])
                    .fold(0usize, |m, i| m | 1 << i);
                let ok = *cache[sys.class][mask]
                    .get_or_insert_with(|| probe.full_rank(sys, &mask_members(mask as u64, n)));
                if !ok {
                    best = Some((total, sys.class, counts.clone()));
                    break;
                }
            }
        }
        // Odometer step.
        let mut i = 0;
        while i < n && counts[i] == l {
            counts[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        counts[i] += 1;
    }
    let (value, class, worst_counts) = best.ok_or_else(|| {
        Error::InvalidParameter("plan has no classes to search".into())
    })?;
    Ok(OracleResult {
        q: value + 1,
        mode: OracleMode::ExhaustiveLedgers,
        worst_counts,
        worst_class: class,
        rank_evaluations: probe.evaluations,
        borderline: probe.borderline,
    })
}

/// A rank-deficient progress vector with `Q_lb - 1` products.
///
/// Class `ℓ - 1` is starved of block `A_{Δ_A - 1}`: the holder that keeps it
/// last among its uncoded tasks stops right before it, and so does every
/// worker whose coded task mixes it in. Everyone else finishes. The pattern
/// is then trimmed from the highest worker down to the target total.
pub fn worst_pattern(plan: &EncodingPlan) -> Result<ProgressLedger> {
    let d = &plan.derived;
    let n = plan.n();
    let l = d.tasks_per_worker;
    let last_block = d.a_blocks - 1;
    let class = l - 1;
    let held_last = n - d.kb;
    let mut counts = vec![l; n];
    for w in &plan.workers {
        let loc = plan.location_of(w.worker, class).ok_or_else(|| {
            Error::InvalidParameter(format!("worker {} never reaches class {class}", w.worker))
        })?;
        let starve = match &w.a_tasks[loc] {
            ATask::Uncoded { index } => *index == last_block && w.worker == held_last,
            ATask::Coded { support, .. } => support.contains(&last_block),
        };
        if starve {
            counts[w.worker] = loc;
        }
    }
    let target = q_bounds(d).q_lb as usize - 1;
    let mut excess = counts.iter().sum::<usize>().saturating_sub(target);
    for c in counts.iter_mut().rev() {
        let cut = excess.min(*c);
        *c -= cut;
        excess -= cut;
    }
    ProgressLedger::from_counts(counts, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::Decoder;
    use crate::encoding::build_plan;
    use crate::scheme::SchemeParams;

    fn plan(n: usize, ka: usize, kb: usize, x: usize, seed: u64) -> EncodingPlan {
        build_plan(&SchemeParams::new(n, ka, kb, x).with_seed(seed)).unwrap()
    }

    #[test]
    fn five_worker_oracle_modes_agree() {
        let p = plan(5, 2, 2, 0, 0);
        let a = q_exact_oracle(&p, OracleMode::ClassSubsets).unwrap();
        let b = q_exact_oracle(&p, OracleMode::ExhaustiveLedgers).unwrap();
        assert_eq!(a.q, 23);
        assert_eq!(b.q, 23);
        assert_eq!(a.borderline, 0);
        let dec = Decoder::new(&p);
        assert!(!dec.is_decodable(&a.worst_counts));
        assert_eq!(a.worst_counts.iter().sum::<usize>(), 22);
    }

    #[test]
    fn exhaustive_on_weight_reduced_plan() {
        let p = plan(5, 3, 1, 1, 4);
        let a = q_exact_oracle(&p, OracleMode::ClassSubsets).unwrap();
        let b = q_exact_oracle(&p, OracleMode::ExhaustiveLedgers).unwrap();
        assert_eq!(a.q, b.q);
        let qb = q_bounds(&p.derived);
        assert!(qb.q_lb <= a.q && a.q <= qb.q_ub);
    }

    #[test]
    fn size_limits() {
        let p = plan(24, 4, 5, 0, 0);
        assert!(matches!(
            q_exact_oracle(&p, OracleMode::ClassSubsets),
            Err(Error::TooLarge(_))
        ));
        let p = plan(12, 3, 3, 0, 0);
        assert!(matches!(
            q_exact_oracle(&p, OracleMode::ExhaustiveLedgers),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn worst_pattern_hits_lower_bound() {
        for (n, ka, kb, x) in [(5, 2, 2, 0), (8, 3, 2, 0), (8, 3, 2, 1), (12, 3, 3, 0), (24, 4, 5, 2)] {
            let p = plan(n, ka, kb, x, 7);
            let ledger = worst_pattern(&p).unwrap();
            assert_eq!(ledger.total() as u64, q_bounds(&p.derived).q_lb - 1, "{n} {ka} {kb} {x}");
            assert!(!Decoder::new(&p).is_decodable(ledger.counts()));
        }
    }

    #[test]
    fn five_worker_pattern() {
        let ledger = worst_pattern(&plan(5, 2, 2, 0, 0)).unwrap();
        assert_eq!(ledger.total(), 22);
    }
}
