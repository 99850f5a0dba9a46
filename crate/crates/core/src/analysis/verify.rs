//! Structural checks of an assignment plan.
//!
//! Plans read from disk are taken as written, so every check works from the
//! task lists rather than from the construction that produced them.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::conditioning::SweepOptions;
use crate::encoding::{appearance_sets, ATask, EncodingPlan};
use crate::error::{Error, Result};
use crate::generator::{build_class_systems, extract_ri};
use crate::linalg::{numerical_rank, rank};

/// Relative tolerance for the holder-subset rank test.
pub const RANK_TOL: f64 = 1e-10;
use crate::subsets::{complement, SubsetSweep};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub exhaustive: bool,
    pub counterexample: Option<String>,
}

impl PropertyCheck {
    fn new(name: &str, cases: usize, exhaustive: bool, counterexample: Option<String>) -> Self {
        Self {
            name: name.into(),
            passed: counterexample.is_none(),
            cases,
            exhaustive,
            counterexample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
    /// Average number of coded appearances of a block, per class.
    pub mu: Vec<f64>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(mut self, other: PropertyReport) -> Self {
        self.checks.extend(other.checks);
        if self.mu.is_empty() {
            self.mu = other.mu;
        }
        self
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "{} {} ({} cases{})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                if c.exhaustive { "" } else { ", sampled" }
            )?;
            if let Some(ce) = &c.counterexample {
                write!(f, ": {ce}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn first<T>(mut it: impl Iterator<Item = T>, msg: impl Fn(T) -> String) -> Option<String> {
    it.next().map(msg)
}

/// Occupancy, balance and disjointness of the `A` assignment.
pub fn verify_assignment_properties(plan: &EncodingPlan) -> PropertyReport {
    let d = &plan.derived;
    let l = d.tasks_per_worker;
    let classes = plan.classes();
    let app = appearance_sets(plan);
    let mut checks = Vec::new();

    let blocks = d.a_blocks;
    let ce = first(
        plan.workers.iter().flat_map(|w| {
            w.a_tasks.iter().enumerate().filter_map(move |(loc, t)| match t {
                ATask::Coded { class, support, .. } => support
                    .iter()
                    .find(|&&b| b >= blocks || b % l != *class)
                    .map(|b| (w.worker, loc, *b, *class)),
                ATask::Uncoded { index } if *index >= blocks => Some((w.worker, loc, *index, l)),
                _ => None,
            })
        }),
        |(w, loc, b, c)| format!("worker {w} location {loc} uses block {b} outside class {c}"),
    );
    checks.push(PropertyCheck::new("support within class", d.n * l, true, ce));

    let ce = first(
        (0..blocks).filter(|&b| app.uncoded[b].len() != d.kb),
        |b| format!("block {b} is sent uncoded to {} workers", app.uncoded[b].len()),
    );
    checks.push(PropertyCheck::new("uncoded appearances", blocks, true, ce));

    let ce = first(
        (0..blocks).filter(|&b| app.coded[b].len() < d.stragglers),
        |b| format!("block {b} appears in {} coded tasks", app.coded[b].len()),
    );
    checks.push(PropertyCheck::new("coded appearances", blocks, true, ce));

    let ce = first(
        classes.classes.iter().enumerate().filter_map(|(m, members)| {
            let sizes: Vec<usize> = members.iter().map(|&b| app.coded[b].len()).collect();
            let (lo, hi) = sizes.iter().copied().minmax().into_option()?;
            (hi - lo > 1).then_some((m, lo, hi))
        }),
        |(m, lo, hi)| format!("class {m} coded appearances range {lo}..={hi}"),
    );
    checks.push(PropertyCheck::new("coded balance", l, true, ce));

    let ce = first(
        (0..blocks).filter_map(|b| {
            app.uncoded[b]
                .iter()
                .find(|w| app.coded[b].contains(w))
                .map(|w| (b, *w))
        }),
        |(b, w)| format!("worker {w} holds block {b} both uncoded and coded"),
    );
    checks.push(PropertyCheck::new("uncoded coded disjoint", blocks, true, ce));

    let ce = first(
        plan.groups().into_iter().enumerate().flat_map(|(g, members)| {
            (0..l).filter_map(move |loc| {
                let seen: BTreeSet<usize> = members
                    .iter()
                    .map(|&w| plan.class_at(w, loc))
                    .collect();
                (seen.len() != members.len() || members.len() != l).then_some((g, loc))
            })
        }),
        |(g, loc)| format!("group {g} repeats a class at location {loc}"),
    );
    checks.push(PropertyCheck::new("group locations", d.groups * l, true, ce));

    let ce = first(
        classes.classes.iter().enumerate().filter_map(|(m, members)| {
            let u: BTreeSet<usize> = members.iter().flat_map(|&b| app.uncoded[b].clone()).collect();
            let v: BTreeSet<usize> = members.iter().flat_map(|&b| app.coded[b].clone()).collect();
            let ok = u.len() == d.class_unknowns()
                && v.len() == d.max_stragglers
                && u.is_disjoint(&v);
            (!ok).then_some((m, u.len(), v.len(), u.intersection(&v).count()))
        }),
        |(m, u, v, both)| {
            format!("class {m}: {u} uncoded holders, {v} coded holders, {both} in both")
        },
    );
    checks.push(PropertyCheck::new("class holders partition", l, true, ce));

    let mu = classes
        .classes
        .iter()
        .map(|members| {
            members.iter().map(|&b| app.coded[b].len()).sum::<usize>() as f64 / members.len() as f64
        })
        .collect();
    PropertyReport { checks, mu }
}

/// Types of the holders of each block are consecutive, and every `kb`
/// columns of each `R_i` are independent. Only defined for `x = 0`.
pub fn verify_type_structure(plan: &EncodingPlan) -> Result<PropertyReport> {
    let d = &plan.derived;
    if d.x != 0 {
        return Err(Error::Unsupported(
            "type structure is only defined for x = 0".into(),
        ));
    }
    let kb = d.kb;
    let sigma = d.appearances;
    let mut consecutive = None;
    let mut independent = None;
    let mut subsets = 0;
    for block in 0..d.a_blocks {
        let ri = extract_ri(plan, block)?;
        let mut types = ri.types(kb);
        types.sort_unstable();
        let is_run = (0..kb).any(|start| {
            let mut run: Vec<usize> = (0..sigma).map(|j| (start + j) % kb).collect();
            run.sort_unstable();
            run == types
        });
        if !is_run && consecutive.is_none() {
            consecutive = Some(format!("block {block} has holder types {types:?}"));
        }
        for cols in (0..ri.workers.len()).combinations(kb) {
            subsets += 1;
            if independent.is_none() && numerical_rank(&ri.r.select_columns(&cols), RANK_TOL) < kb {
                let workers: Vec<usize> = cols.iter().map(|&c| ri.workers[c]).collect();
                independent = Some(format!("block {block} workers {workers:?} are dependent"));
            }
        }
    }
    Ok(PropertyReport {
        checks: vec![
            PropertyCheck::new("consecutive types", d.a_blocks, true, consecutive),
            PropertyCheck::new("holder subsets independent", subsets, true, independent),
        ],
        mu: Vec::new(),
    })
}

/// Every class keeps full rank whatever `s` workers are lost.
pub fn verify_resilience(plan: &EncodingPlan, s: usize, options: SweepOptions) -> PropertyReport {
    let n = plan.n();
    let k = plan.derived.class_unknowns();
    let systems = build_class_systems(plan);
    let sweep = SubsetSweep::new(n, s.min(n), options.exhaustive_cap, options.samples, options.seed);
    let failure = (0..sweep.len()).into_par_iter().find_first(|&i| {
        let survivors = complement(n, &sweep.get(i));
        systems
            .iter()
            .any(|sys| survivors.len() < k || rank(&sys.g.select_columns(&survivors)) < k)
    });
    let ce = failure.map(|i| format!("stragglers {:?}", sweep.get(i)));
    PropertyReport {
        checks: vec![PropertyCheck::new(
            &format!("resilient to {s} stragglers"),
            sweep.len(),
            sweep.exhaustive,
            ce,
        )],
        mu: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::build_plan;
    use crate::scheme::SchemeParams;
    use proptest::prelude::*;

    fn plan(n: usize, ka: usize, kb: usize, x: usize) -> EncodingPlan {
        build_plan(&SchemeParams::new(n, ka, kb, x).with_seed(11)).unwrap()
    }

    #[test]
    fn twelve_worker_plan_passes() {
        let p = plan(12, 3, 3, 0);
        let r = verify_assignment_properties(&p);
        assert!(r.all_passed(), "{r}");
        assert_eq!(r.mu, vec![3.0; 4]);
        let t = verify_type_structure(&p).unwrap();
        assert!(t.all_passed(), "{t}");
        assert!(verify_resilience(&p, 3, SweepOptions::default()).all_passed());
        assert!(!verify_resilience(&p, 4, SweepOptions::default()).all_passed());
    }

    #[test]
    fn swapped_support_member_is_caught() {
        let mut p = plan(12, 3, 3, 0);
        // Worker 0's coded task mixes A_3, A_7, A_11; pull in A_8 instead.
        match &mut p.workers[0].a_tasks[3] {
            ATask::Coded { support, .. } => {
                assert_eq!(support, &vec![3, 7, 11]);
                support[2] = 8;
            }
            other => panic!("unexpected task {other:?}"),
        }
        let r = verify_assignment_properties(&p);
        assert!(!r.check("support within class").unwrap().passed);
        assert!(!r.check("class holders partition").unwrap().passed);
        assert!(!r.all_passed());
    }

    #[test]
    fn weight_reduced_mu() {
        let p = plan(8, 3, 2, 1);
        let r = verify_assignment_properties(&p);
        assert!(r.all_passed(), "{r}");
        let d = &p.derived;
        let expected = (d.max_stragglers * d.coded_a_weight()) as f64 / d.ka as f64;
        assert!(r.mu.iter().all(|m| (m - expected).abs() < 1e-12));
        assert!(matches!(verify_type_structure(&p), Err(Error::Unsupported(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn generated_plans_pass(ka in 1usize..5, kb in 1usize..5, extra in 1usize..7, xs in 0usize..50, seed in any::<u64>()) {
            let n = ka * kb + extra;
            let x = xs % extra;
            let p = build_plan(&SchemeParams::new(n, ka, kb, x).with_seed(seed)).unwrap();
            let r = verify_assignment_properties(&p);
            prop_assert!(r.all_passed(), "{}", r);
            let s = p.derived.stragglers;
            let res = verify_resilience(&p, s, SweepOptions { exhaustive_cap: 2000, samples: 200, seed });
            prop_assert!(res.all_passed(), "{}", res);
            if x == 0 {
                let t = verify_type_structure(&p).unwrap();
                prop_assert!(t.all_passed(), "{}", t);
            }
        }
    }
}
