//! Worst-case condition number over straggler sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::EncodingPlan;
use crate::error::{Error, Result};
use crate::generator::build_class_systems;
use crate::linalg::condition_number;
use crate::subsets::{complement, SubsetSweep, DEFAULT_SAMPLES, EXHAUSTIVE_CAP};

pub const KAPPA_DEFINITION: &str = "max over classes of sigma_max/sigma_min of the ka*kb x (n-s) \
     generator restricted to the surviving workers, maximised over straggler sets of size s";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Enumerate every subset when there are at most this many.
    pub exhaustive_cap: u128,
    /// Otherwise draw this many.
    pub samples: usize,
    pub seed: u64,
}

impl SweepOptions {
    pub fn seeded(seed: u64) -> Self {
        Self {
            exhaustive_cap: EXHAUSTIVE_CAP,
            samples: DEFAULT_SAMPLES,
            seed,
        }
    }
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self::seeded(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningReport {
    pub kappa_worst: f64,
    pub worst_stragglers: Vec<usize>,
    pub worst_class: usize,
    /// Minimum, median, 90th, 99th percentile and maximum of the per-subset κ.
    pub quantiles: [f64; 5],
    pub subsets: usize,
    pub exhaustive: bool,
    pub definition: &'static str,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

pub fn kappa_worst(plan: &EncodingPlan, s: usize, options: SweepOptions) -> Result<ConditioningReport> {
    let n = plan.n();
    let k = plan.derived.class_unknowns();
    if s > n || n - s < k {
        return Err(Error::TooFewSurvivors {
            got: n.saturating_sub(s),
            needed: k,
        });
    }
    let systems = build_class_systems(plan);
    let sweep = SubsetSweep::new(n, s, options.exhaustive_cap, options.samples, options.seed);
    let per_subset: Vec<(f64, usize)> = (0..sweep.len())
        .into_par_iter()
        .map(|i| {
            let survivors = complement(n, &sweep.get(i));
            systems
                .iter()
                .map(|sys| (condition_number(&sys.g.select_columns(&survivors)), sys.class))
                .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
        })
        .collect();
    let (idx, &(kappa, class)) = per_subset
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &(f64, usize))>, cur| match best {
            Some(b) if b.1 .0 >= cur.1 .0 => Some(b),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::InvalidParameter("empty subset sweep".into()))?;
    let mut values: Vec<f64> = per_subset.iter().map(|v| v.0).collect();
    values.sort_by(f64::total_cmp);
    Ok(ConditioningReport {
        kappa_worst: kappa,
        worst_stragglers: sweep.get(idx),
        worst_class: class,
        quantiles: [0.0, 0.5, 0.9, 0.99, 1.0].map(|q| quantile(&values, q)),
        subsets: sweep.len(),
        exhaustive: sweep.exhaustive,
        definition: KAPPA_DEFINITION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::build_plan;
    use crate::scheme::SchemeParams;

    #[test]
    fn small_plan_sweep() {
        let p = build_plan(&SchemeParams::new(5, 2, 2, 0).with_seed(1)).unwrap();
        let r = kappa_worst(&p, 1, SweepOptions::default()).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.subsets, 5);
        assert!(r.kappa_worst.is_finite() && r.kappa_worst >= 1.0);
        assert_eq!(r.quantiles[4], r.kappa_worst);
        assert!(r.quantiles.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(r.worst_stragglers.len(), 1);
    }

    #[test]
    fn too_many_stragglers() {
        let p = build_plan(&SchemeParams::new(5, 2, 2, 0)).unwrap();
        assert!(kappa_worst(&p, 2, SweepOptions::default()).is_err());
    }

    #[test]
    fn sampled_sweep_is_seeded() {
        let p = build_plan(&SchemeParams::new(12, 3, 3, 0)).unwrap();
        let opts = SweepOptions {
            exhaustive_cap: 10,
            samples: 40,
            seed: 9,
        };
        let a = kappa_worst(&p, 3, opts).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a, kappa_worst(&p, 3, opts).unwrap());
    }
}
