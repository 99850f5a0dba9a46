//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the PASS/FAIL lines are always shown.
//! A criterion marked `informative` is printed but does not fail the run
//! unless `ACCEPTANCE_STRICT=1`.

use std::path::Path;
use std::time::{Duration, Instant};

use itertools::Itertools;
use sha2::{Digest, Sha256};

use coded_matmul::analysis::{
    kappa_worst, q_bounds, q_exact_oracle, sparsity_cost_model, verify_assignment_properties,
    verify_resilience, verify_type_structure, OracleMode, SweepOptions,
};
use coded_matmul::baseline::{chebyshev_points, equispaced_points, poly_kappa_worst, poly_plan};
use coded_matmul::decoder::{CompletedProduct, Decoder};
use coded_matmul::encoding::{build_plan, encode_blocks, ATask, EncodingPlan};
use coded_matmul::linalg::{gram_product, partition_columns, Matrix};
use coded_matmul::simulator::{compare_overall, SweepEntry, TaskCosts};
use coded_matmul::subsets::binomial;
use coded_matmul::synthetic::{random_dense, random_matrix};
use coded_matmul::{derive_params, SchemeParams};

const DERIVE_BUDGET: Duration = Duration::from_millis(1);
const Q_BOUNDS_BUDGET: Duration = Duration::from_millis(1);
const EXHAUSTIVE_ORACLE_BUDGET: Duration = Duration::from_secs(1);
const SUBSET_ORACLE_BUDGET: Duration = Duration::from_secs(60);
const RESILIENCE_BUDGET: Duration = Duration::from_secs(120);
const CONDITIONING_BUDGET: Duration = Duration::from_secs(600);
const DECODE_REL_TOL: f64 = 1e-6;
const DENSITY_REL_TOL: f64 = 0.10;
const ORDERS_OF_MAGNITUDE: f64 = 2.0;
const CONDITIONING_SEEDS: u64 = 10;
const SAMPLE_CAP: usize = 100_000;

type Criterion = fn() -> Vec<Outcome>;

struct Outcome {
    passed: bool,
    gating: bool,
    summary: String,
}

fn gate(passed: bool, summary: String) -> Outcome {
    Outcome {
        passed,
        gating: true,
        summary,
    }
}

fn plan(n: usize, ka: usize, kb: usize, x: usize, seed: u64) -> EncodingPlan {
    build_plan(&SchemeParams::new(n, ka, kb, x).with_seed(seed)).unwrap()
}

fn per_call<T>(reps: u32, mut f: impl FnMut() -> T) -> (T, Duration) {
    let start = Instant::now();
    let mut last = f();
    for _ in 1..reps {
        last = f();
    }
    (last, start.elapsed() / reps)
}

fn criterion_1() -> Vec<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, expected) in [(0, (4, 3)), (2, (2, 3))] {
        let params = SchemeParams::new(24, 4, 5, x);
        let (d, t) = per_call(1000, || derive_params(&params).unwrap());
        let got = (d.coded_a_weight(), d.b_weight);
        ok &= got == expected && t < DERIVE_BUDGET;
        parts.push(format!("x={x} weights {got:?} in {t:?}"));
    }
    vec![gate(ok, parts.join(", "))]
}

fn criterion_2() -> Vec<Outcome> {
    let cases = [
        ((8, 3, 2, 0), (59, 59)),
        ((8, 3, 2, 1), (60, 62)),
        ((24, 4, 5, 0), (139, 139)),
        ((24, 4, 5, 2), (141, 142)),
        ((5, 2, 2, 0), (23, 23)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((n, ka, kb, x), expected) in cases {
        let d = derive_params(&SchemeParams::new(n, ka, kb, x)).unwrap();
        let (b, t) = per_call(1000, || q_bounds(&d));
        ok &= (b.q_lb, b.q_ub) == expected && t < Q_BOUNDS_BUDGET;
        parts.push(format!("({n},{ka},{kb},{x}) -> ({},{})", b.q_lb, b.q_ub));
    }
    vec![gate(ok, parts.join(", "))]
}

fn criterion_3() -> Vec<Outcome> {
    let start = Instant::now();
    let small = q_exact_oracle(&plan(5, 2, 2, 0, 0), OracleMode::ExhaustiveLedgers).unwrap();
    let t_small = start.elapsed();
    let start = Instant::now();
    let x0 = q_exact_oracle(&plan(8, 3, 2, 0, 0), OracleMode::ClassSubsets).unwrap();
    let t_x0 = start.elapsed();
    let x1 = q_exact_oracle(&plan(8, 3, 2, 1, 0), OracleMode::ClassSubsets).unwrap();
    let gating = gate(
        small.q == 23
            && t_small < EXHAUSTIVE_ORACLE_BUDGET
            && x0.q == 59
            && t_x0 < SUBSET_ORACLE_BUDGET
            && (60..=62).contains(&x1.q),
        format!(
            "5-worker exhaustive Q={} in {t_small:?}, (8,3,2,0) Q={} in {t_x0:?}, (8,3,2,1) Q={} within [60,62]",
            small.q, x0.q, x1.q
        ),
    );
    let exact = Outcome {
        passed: x1.q == 61,
        gating: false,
        summary: format!("(8,3,2,1) oracle Q={} against the reported 61", x1.q),
    };
    vec![gating, exact]
}

/// Worst relative error over every straggler set of size `s`.
fn worst_decode_error(p: &EncodingPlan, a: &Matrix, b: &Matrix) -> (f64, usize) {
    let d = &p.derived;
    let pa = partition_columns(a, d.a_blocks, false).unwrap();
    let pb = partition_columns(b, d.b_blocks, false).unwrap();
    let payloads = encode_blocks(&pa, &pb, p).unwrap();
    let products = CompletedProduct::all_from(&payloads).unwrap();
    let direct = gram_product(a, b).unwrap().value;
    let decoder = Decoder::new(p);
    let mut worst = 0.0f64;
    let mut count = 0;
    for stragglers in (0..d.n).combinations(d.stragglers) {
        let survivors: Vec<usize> = (0..d.n).filter(|w| !stragglers.contains(w)).collect();
        let kept: Vec<CompletedProduct> = products
            .iter()
            .filter(|q| survivors.contains(&q.worker))
            .cloned()
            .collect();
        let r = decoder.decode_from_survivors(&kept, &survivors).unwrap();
        worst = worst.max(r.product.relative_error(&direct));
        count += 1;
    }
    (worst, count)
}

fn criterion_4() -> Vec<Outcome> {
    let start = Instant::now();
    let dense = |r, c, s| Matrix::Dense(random_dense(r, c, s));
    let (e1, c1) = worst_decode_error(&plan(12, 3, 3, 0, 1), &dense(120, 120, 10), &dense(120, 120, 11));
    let (e2, c2) = worst_decode_error(&plan(5, 2, 2, 0, 1), &dense(120, 120, 12), &dense(120, 120, 13));
    let (e3, c3) = worst_decode_error(&plan(5, 3, 1, 1, 1), &dense(120, 120, 14), &dense(120, 1, 15));
    let t = start.elapsed();
    let worst = e1.max(e2).max(e3);
    vec![gate(
        c1 == 220 && c2 == 5 && c3 == 5 && worst <= DECODE_REL_TOL && t < RESILIENCE_BUDGET,
        format!("{c1}+{c2}+{c3} straggler sets, worst relative error {worst:.2e}, {t:?}"),
    )]
}

fn criterion_5() -> Vec<Outcome> {
    let grid = [
        (5, 2, 2, 0),
        (5, 3, 1, 1),
        (8, 3, 2, 0),
        (8, 3, 2, 1),
        (12, 3, 3, 0),
        (24, 4, 5, 0),
        (24, 4, 5, 2),
    ];
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut resilience_subsets = 0;
    for (n, ka, kb, x) in grid {
        let p = plan(n, ka, kb, x, 3);
        let mut reports = vec![verify_assignment_properties(&p)];
        if x == 0 {
            reports.push(verify_type_structure(&p).unwrap());
        }
        let d = &p.derived;
        let resilience = SweepOptions {
            exhaustive_cap: if n <= 12 { u128::MAX } else { SAMPLE_CAP as u128 },
            samples: SAMPLE_CAP,
            seed: 3,
        };
        let r = verify_resilience(&p, n - d.threshold, resilience);
        resilience_subsets += r.checks[0].cases;
        if n <= 12 {
            assert_eq!(r.checks[0].cases as u128, binomial(n, d.threshold));
        }
        reports.push(r);
        for report in reports {
            for c in report.checks {
                checks += 1;
                if !c.passed {
                    failures.push(format!("({n},{ka},{kb},{x}) {}: {:?}", c.name, c.counterexample));
                }
            }
        }
    }
    vec![gate(
        failures.is_empty(),
        format!(
            "{checks} suite checks on 7 grid points, {resilience_subsets} column subsets, failures {failures:?}"
        ),
    )]
}

fn criterion_6() -> Vec<Outcome> {
    let p = plan(12, 3, 3, 0, 4);
    let d = &p.derived;
    let cost = sparsity_cost_model(d, 3000, 1200, 900, 0.02);
    let density = 0.02;
    let a = random_matrix(3000, 1200, density, 40);
    let b = random_matrix(3000, 900, density, 41);
    let pa = partition_columns(&a, d.a_blocks, false).unwrap();
    let pb = partition_columns(&b, d.b_blocks, false).unwrap();
    let payloads = encode_blocks(&pa, &pb, &p).unwrap();
    // weight -> (nnz, entries)
    let mut tally = std::collections::BTreeMap::<usize, (f64, f64)>::new();
    let mut add = |w: usize, m: &Matrix| {
        let e = tally.entry(w).or_default();
        e.0 += m.nnz() as f64;
        e.1 += (m.rows() * m.cols()) as f64;
    };
    for (wp, payload) in p.workers.iter().zip(&payloads) {
        for (task, blk) in wp.a_tasks.iter().zip(&payload.a_blocks) {
            add(task.weight(), blk);
        }
        add(wp.b.support.len() + 1000, &payload.b_block);
    }
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (key, (nnz, entries)) in tally {
        let w = key % 1000;
        let predicted = 1.0 - (1.0 - density).powi(w as i32);
        let measured = nnz / entries;
        worst = worst.max((measured - predicted).abs() / predicted);
        parts.push(format!(
            "{}{w}: {measured:.4}/{predicted:.4}",
            if key >= 1000 { "B" } else { "A" }
        ));
    }
    let a_weights: Vec<usize> = p.workers[0].a_tasks.iter().map(ATask::weight).collect();
    vec![gate(
        cost.limit_ratio == (1, 3) && worst <= DENSITY_REL_TOL && a_weights.contains(&3),
        format!(
            "ratio {}/{} (model {:.6}), encoded densities {} (worst deviation {:.1}%)",
            cost.limit_ratio.0,
            cost.limit_ratio.1,
            cost.ratio,
            parts.join(" "),
            100.0 * worst
        ),
    )]
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn within_band(value: f64, reference: f64) -> bool {
    (value.log10() - reference.log10()).abs() <= ORDERS_OF_MAGNITUDE
}

fn criterion_7() -> Vec<Outcome> {
    let start = Instant::now();
    let mut k0 = Vec::new();
    let mut k2 = Vec::new();
    for seed in 0..CONDITIONING_SEEDS {
        let opts = SweepOptions {
            exhaustive_cap: SAMPLE_CAP as u128,
            samples: SAMPLE_CAP,
            seed,
        };
        k0.push(kappa_worst(&plan(24, 4, 5, 0, seed), 4, opts).unwrap().kappa_worst);
        k2.push(kappa_worst(&plan(24, 4, 5, 2, seed), 2, opts).unwrap().kappa_worst);
    }
    let (m0, m2) = (median(k0), median(k2));
    let poly = poly_kappa_worst(&poly_plan(24, 4, 5, None).unwrap(), 4, 0).unwrap();
    let t = start.elapsed();
    let equi = poly_kappa_worst(&poly_plan(24, 4, 5, Some(equispaced_points(24))).unwrap(), 4, 0).unwrap();
    let cheb = poly_kappa_worst(&poly_plan(24, 4, 5, Some(chebyshev_points(24))).unwrap(), 4, 0).unwrap();
    let ordering = gate(
        m2 < m0
            && m0 < poly.kappa_worst
            && within_band(m2, 2.25e4)
            && within_band(m0, 2.37e6)
            && t < CONDITIONING_BUDGET,
        format!(
            "median kappa x=2 {m2:.3e} < x=0 {m0:.3e} < polynomial {:.3e}; both proposed medians within 2 orders of 2.25e4 / 2.37e6; {t:?}",
            poly.kappa_worst
        ),
    );
    let band = Outcome {
        passed: poly.kappa_worst.is_finite() && within_band(poly.kappa_worst, 2.40e10),
        gating: false,
        summary: format!(
            "polynomial kappa with nodes 1..24 is {:.3e}, band is 2.40e10 +/- 2 orders; \
             in exact arithmetic it is at least 1.2e36 (survivors 5..24), so no evaluation can land in the band \
             (equispaced [-1,1] nodes: {:.3e}, Chebyshev nodes: {:.3e})",
            poly.kappa_worst, equi.kappa_worst, cheb.kappa_worst
        ),
    };
    vec![ordering, band]
}

fn criterion_8() -> Vec<Outcome> {
    let p = plan(24, 4, 5, 0, 5);
    let poly = poly_plan(24, 4, 5, None).unwrap();
    let density = 0.02;
    let a = random_matrix(2000, 2400, density, 50);
    let b = random_matrix(2000, 1000, density, 51);
    let proposed = TaskCosts::measured_proposed(
        &p,
        &partition_columns(&a, 24, false).unwrap(),
        &partition_columns(&b, 5, false).unwrap(),
    )
    .unwrap();
    let baseline = TaskCosts::measured_poly(
        &poly,
        &partition_columns(&a, 4, false).unwrap(),
        &partition_columns(&b, 5, false).unwrap(),
    )
    .unwrap();
    let decoder = Decoder::new(&p);
    let counts: Vec<usize> = (0..=6).collect();
    let rows = compare_overall(
        &[
            SweepEntry {
                schedule: &decoder,
                costs: &proposed,
            },
            SweepEntry {
                schedule: &poly,
                costs: &baseline,
            },
        ],
        &counts,
        0.2,
    )
    .unwrap();
    let times = |scheme: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| r.decode_time)
            .collect()
    };
    let (tp, tb) = (times("proposed"), times("polynomial"));
    let below = tp.iter().zip(&tb).all(|(p, b)| p < b);
    let s_m = p.derived.max_stragglers;
    let flat = tb[..=s_m].iter().all(|t| *t <= tb[0] * 1.25);
    let jump = tb[s_m + 1] / tb[s_m];
    vec![gate(
        below && flat && jump >= 2.0,
        format!(
            "proposed {:?} vs polynomial {:?} (flop units, millions); polynomial jumps x{jump:.2} past {s_m} slow workers",
            tp.iter().map(|t| (t / 1e4).round() / 100.0).collect::<Vec<_>>(),
            tb.iter().map(|t| (t / 1e4).round() / 100.0).collect::<Vec<_>>()
        ),
    )]
}

fn hash_dir(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let digest = Sha256::digest(std::fs::read(&path).unwrap());
            let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
            (path.file_name().unwrap().to_string_lossy().into_owned(), hex)
        })
        .collect();
    out.sort();
    out
}

fn criterion_9() -> Vec<Outcome> {
    let runs: [&[&str]; 9] = [
        &["derive", "--n", "24", "--ka", "4", "--kb", "5", "--x", "2"],
        &["plan", "--n", "12", "--ka", "3", "--kb", "3", "--seed", "7"],
        &["verify", "--n", "8", "--ka", "3", "--kb", "2", "--x", "1", "--seed", "7"],
        &["q-bounds", "--n", "8", "--ka", "3", "--kb", "2", "--x", "1"],
        &["q-oracle", "--n", "5", "--ka", "2", "--kb", "2", "--mode", "exhaustive", "--seed", "7"],
        &["cond", "--n", "12", "--ka", "3", "--kb", "3", "--seed", "7"],
        &[
            "simulate", "--n", "12", "--ka", "3", "--kb", "3", "--seed", "7", "--cost-model", "nnz",
            "--density", "0.05",
        ],
        &["multiply", "--n", "5", "--ka", "2", "--kb", "2", "--seed", "7", "--straggler-count", "1"],
        &["baseline", "--n", "8", "--ka", "3", "--kb", "2", "--seed", "7"],
    ];
    let root = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for args in runs {
        let mut hashes = Vec::new();
        for rep in 0..2 {
            let dir = root.path().join(format!("{}-{rep}", args[0]));
            let mut argv = vec!["coded-matmul".to_string()];
            argv.extend(args.iter().map(|s| s.to_string()));
            argv.extend(["--out".to_string(), dir.to_string_lossy().into_owned()]);
            let code = coded_matmul::cli::run(argv, &mut std::io::sink(), &mut std::io::sink());
            assert_eq!(code, 0, "{args:?}");
            hashes.push(hash_dir(&dir));
        }
        files += hashes[0].len();
        if hashes[0] != hashes[1] {
            differing.push(args[0]);
        }
    }
    vec![gate(
        differing.is_empty(),
        format!("9 subcommands run twice, {files} output files per run, differing {differing:?}"),
    )]
}

fn main() {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [(u32, Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut gating_failures = 0;
    for (n, run) in criteria {
        for o in run() {
            let tag = if o.passed { "PASS" } else { "FAIL" };
            let kind = if o.gating { "" } else { " (informative)" };
            println!("[{tag}] criterion {n}{kind}: {}", o.summary);
            if !o.passed && (o.gating || strict) {
                gating_failures += 1;
            }
        }
    }
    if gating_failures > 0 {
        println!("{gating_failures} gating failure(s)");
        std::process::exit(1);
    }
}
