//! Enumeration of `k`-subsets of `0..n`, exhaustive when small and seeded
//! uniform sampling otherwise.

use rand::Rng;

use crate::synthetic::rng_from_seed;

/// Exhaustive sweeps are used up to this many subsets.
pub const EXHAUSTIVE_CAP: u128 = 10_000_000;
/// Number of samples drawn once the cap is exceeded.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th `k`-subset of `0..n` in colexicographic order.
pub fn unrank_colex(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut upper = n;
    for slot in (0..k).rev() {
        let size = slot + 1;
        // Largest c < upper with C(c, size) <= rank.
        let mut c = upper - 1;
        while binomial(c, size) > rank {
            c -= 1;
        }
        out[slot] = c;
        rank -= binomial(c, size);
        upper = c;
    }
    out
}

/// A deterministic list of `k`-subsets of `0..n`.
#[derive(Debug, Clone, Copy)]
pub struct SubsetSweep {
    pub n: usize,
    pub k: usize,
    pub total: u128,
    pub exhaustive: bool,
    len: usize,
    seed: u64,
}

impl SubsetSweep {
    /// Exhaustive when `C(n, k) <= cap`, otherwise `samples` seeded draws.
    pub fn new(n: usize, k: usize, cap: u128, samples: usize, seed: u64) -> Self {
        let total = binomial(n, k);
        let exhaustive = total <= cap;
        Self {
            n,
            k,
            total,
            exhaustive,
            len: if exhaustive { total as usize } else { samples },
            seed,
        }
    }

    pub fn with_defaults(n: usize, k: usize, seed: u64) -> Self {
        Self::new(n, k, EXHAUSTIVE_CAP, DEFAULT_SAMPLES, seed)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Subset number `idx`; each index is computed independently so sweeps
    /// can be split across threads.
    pub fn get(&self, idx: usize) -> Vec<usize> {
        let rank = if self.exhaustive {
            idx as u128
        } else {
            let mut rng = rng_from_seed(self.seed);
            rng.set_stream(idx as u64);
            rng.gen_range(0..self.total)
        };
        unrank_colex(rank, self.n, self.k)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// `0..n` minus the sorted `removed` set.
pub fn complement(n: usize, removed: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - removed.len());
    let mut it = removed.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(24, 20), 10626);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(100, 50), 100891344545564193334812497256);
    }

    #[test]
    fn exhaustive_sweep_lists_every_subset_once() {
        let sweep = SubsetSweep::with_defaults(7, 3, 0);
        assert!(sweep.exhaustive);
        let got: Vec<Vec<usize>> = sweep.iter().collect();
        let mut sorted = got.clone();
        sorted.sort();
        let expected: Vec<Vec<usize>> = (0..7).combinations(3).collect();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn sampling_kicks_in_past_cap() {
        let sweep = SubsetSweep::new(30, 10, 1000, 50, 9);
        assert!(!sweep.exhaustive);
        assert_eq!(sweep.len(), 50);
        let a: Vec<_> = sweep.iter().collect();
        let b: Vec<_> = sweep.iter().collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.len() == 10 && s.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn complement_works() {
        assert_eq!(complement(5, &[1, 3]), vec![0, 2, 4]);
        assert_eq!(complement(3, &[]), vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn unrank_is_strictly_increasing_and_in_range(n in 1usize..20, k in 0usize..20, r in any::<u64>()) {
            let k = k % (n + 1);
            let total = binomial(n, k);
            let s = unrank_colex(r as u128 % total, n, k);
            prop_assert_eq!(s.len(), k);
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.iter().all(|&v| v < n));
        }
    }
}
