//! The assignment plan: which `A` blocks (plain or combined) and which `B`
//! combination every worker receives, in execution order.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_product, GramProduct, Matrix, PartitionedMatrix};
use crate::scheme::{derive_params, DerivedParams, SchemeParams};
use crate::synthetic::{rng_from_seed, uniform_coefficient};

/// The `ℓ` classes of `A` blocks; class `m` holds `m, ℓ+m, …, (ka-1)ℓ+m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecomposition {
    pub classes: Vec<Vec<usize>>,
}

impl ClassDecomposition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, block: usize) -> usize {
        block % self.classes.len()
    }

    /// Position of `block` inside its class.
    pub fn position_of(&self, block: usize) -> usize {
        block / self.classes.len()
    }
}

pub fn decompose_classes(derived: &DerivedParams) -> ClassDecomposition {
    let l = derived.tasks_per_worker;
    ClassDecomposition {
        classes: (0..l)
            .map(|m| (0..derived.ka).map(|j| j * l + m).collect())
            .collect(),
    }
}

/// One `A`-side block assigned to a worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ATask {
    Uncoded {
        index: usize,
    },
    Coded {
        class: usize,
        support: Vec<usize>,
        coefficients: Vec<f64>,
    },
}

impl ATask {
    /// Class of the task given `ℓ` classes.
    pub fn class(&self, classes: usize) -> usize {
        match self {
            ATask::Uncoded { index } => index % classes,
            ATask::Coded { class, .. } => *class,
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            ATask::Uncoded { .. } => 1,
            ATask::Coded { support, .. } => support.len(),
        }
    }

    pub fn is_coded(&self) -> bool {
        matches!(self, ATask::Coded { .. })
    }

    /// `(block, coefficient)` pairs; uncoded tasks have coefficient 1.
    pub fn terms(&self) -> Vec<(usize, f64)> {
        match self {
            ATask::Uncoded { index } => vec![(*index, 1.0)],
            ATask::Coded {
                support,
                coefficients,
                ..
            } => support.iter().copied().zip(coefficients.iter().copied()).collect(),
        }
    }
}

/// The `B` combination held by a worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSpec {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// `worker mod kb`.
    pub type_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerPlan {
    pub worker: usize,
    /// Executed top to bottom; index = location.
    pub a_tasks: Vec<ATask>,
    pub b: BSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan {
    pub params: SchemeParams,
    pub derived: DerivedParams,
    pub workers: Vec<WorkerPlan>,
    /// Class counters after the last assignment.
    pub lambda: Vec<usize>,
}

impl EncodingPlan {
    pub fn n(&self) -> usize {
        self.derived.n
    }

    pub fn tasks_per_worker(&self) -> usize {
        self.derived.tasks_per_worker
    }

    pub fn classes(&self) -> ClassDecomposition {
        decompose_classes(&self.derived)
    }

    /// Worker groups of `ℓ` consecutive workers.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let l = self.derived.tasks_per_worker;
        (0..self.derived.groups)
            .map(|g| (g * l..(g + 1) * l).collect())
            .collect()
    }

    pub fn class_at(&self, worker: usize, location: usize) -> usize {
        self.workers[worker].a_tasks[location].class(self.derived.tasks_per_worker)
    }

    /// First location of `class` in `worker`'s list.
    pub fn location_of(&self, worker: usize, class: usize) -> Option<usize> {
        let l = self.derived.tasks_per_worker;
        self.workers[worker]
            .a_tasks
            .iter()
            .position(|t| t.class(l) == class)
    }

    /// `locations[m][i]` = location of class `m` at worker `i`, or `ℓ` if
    /// the worker never touches the class.
    pub fn location_table(&self) -> Vec<Vec<usize>> {
        let l = self.derived.tasks_per_worker;
        (0..l)
            .map(|m| {
                (0..self.n())
                    .map(|i| self.location_of(i, m).unwrap_or(l))
                    .collect()
            })
            .collect()
    }
}

pub fn build_plan(params: &SchemeParams) -> Result<EncodingPlan> {
    let derived = derive_params(params)?;
    Ok(assign(params, derived))
}

/// Like [`build_plan`] but with a caller-chosen `B` weight.
pub fn build_plan_with_zeta(params: &SchemeParams, zeta: usize) -> Result<EncodingPlan> {
    let derived = derive_params(params)?.with_b_weight(zeta)?;
    Ok(assign(params, derived))
}

fn assign(params: &SchemeParams, d: DerivedParams) -> EncodingPlan {
    let classes = decompose_classes(&d);
    let l = d.tasks_per_worker;
    let weight = d.coded_a_weight();
    let mut lambda = vec![0usize; l];
    let mut rng = rng_from_seed(params.seed);
    let mut workers = Vec::with_capacity(d.n);

    for i in 0..d.n {
        let u = i * d.shift;
        let mut a_tasks: Vec<ATask> = (0..d.uncoded_per_worker)
            .map(|j| ATask::Uncoded {
                index: (u + j) % d.a_blocks,
            })
            .collect();
        for j in 0..d.coded_per_worker {
            let v = (u + d.uncoded_per_worker + j) % l;
            let support: Vec<usize> = (0..weight)
                .map(|t| classes.classes[v][(lambda[v] + t) % d.ka])
                .collect();
            let coefficients = (0..weight).map(|_| uniform_coefficient(&mut rng)).collect();
            lambda[v] = (lambda[v] + weight) % d.ka;
            a_tasks.push(ATask::Coded {
                class: v,
                support,
                coefficients,
            });
        }
        let b = BSpec {
            support: (0..d.b_weight).map(|t| (i + t) % d.kb).collect(),
            coefficients: (0..d.b_weight)
                .map(|_| uniform_coefficient(&mut rng))
                .collect(),
            type_id: i % d.kb,
        };
        workers.push(WorkerPlan {
            worker: i,
            a_tasks,
            b,
        });
    }
    EncodingPlan {
        params: *params,
        derived: d,
        workers,
        lambda,
    }
}

/// `U_i` and `V_i`: workers holding block `i` uncoded, and inside a coded
/// combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppearanceIndex {
    pub uncoded: Vec<Vec<usize>>,
    pub coded: Vec<Vec<usize>>,
}

impl AppearanceIndex {
    /// Every worker holding block `i`, sorted.
    pub fn all(&self, block: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.uncoded[block]
            .iter()
            .chain(&self.coded[block])
            .copied()
            .collect();
        v.sort_unstable();
        v
    }
}

/// Scan every task of `plan`. Indices outside `0..Δ_A` are ignored.
pub fn appearance_sets(plan: &EncodingPlan) -> AppearanceIndex {
    let blocks = plan.derived.a_blocks;
    let mut uncoded = vec![Vec::new(); blocks];
    let mut coded = vec![Vec::new(); blocks];
    for w in &plan.workers {
        for task in &w.a_tasks {
            match task {
                ATask::Uncoded { index } if *index < blocks => uncoded[*index].push(w.worker),
                ATask::Coded { support, .. } => {
                    for &s in support.iter().filter(|s| **s < blocks) {
                        coded[s].push(w.worker);
                    }
                }
                _ => {}
            }
        }
    }
    AppearanceIndex { uncoded, coded }
}

/// What one worker stores: `ℓ` `A`-side blocks and one `B`-side block.
#[derive(Debug, Clone)]
pub struct WorkerPayload<'a> {
    pub worker: usize,
    pub a_blocks: Vec<Cow<'a, Matrix>>,
    pub b_block: Cow<'a, Matrix>,
}

fn combine<'a>(blocks: &'a PartitionedMatrix, terms: &[(usize, f64)]) -> Result<Cow<'a, Matrix>> {
    if let Some(&(idx, _)) = terms.iter().find(|(idx, _)| *idx >= blocks.block_count()) {
        return Err(Error::DimensionMismatch(format!(
            "plan references block {idx} but only {} exist",
            blocks.block_count()
        )));
    }
    if let [(idx, c)] = terms {
        if *c == 1.0 {
            return Ok(Cow::Borrowed(blocks.block(*idx)));
        }
    }
    let refs: Vec<(f64, &Matrix)> = terms.iter().map(|&(i, c)| (c, blocks.block(i))).collect();
    Matrix::linear_combination(&refs).map(Cow::Owned)
}

/// Materialize every worker's payload. Uncoded blocks are borrowed.
pub fn encode_blocks<'a>(
    a: &'a PartitionedMatrix,
    b: &'a PartitionedMatrix,
    plan: &EncodingPlan,
) -> Result<Vec<WorkerPayload<'a>>> {
    let d = &plan.derived;
    if a.block_count() != d.a_blocks || b.block_count() != d.b_blocks {
        return Err(Error::DimensionMismatch(format!(
            "plan expects {} A blocks and {} B blocks, got {} and {}",
            d.a_blocks,
            d.b_blocks,
            a.block_count(),
            b.block_count()
        )));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows but B has {}",
            a.rows(),
            b.rows()
        )));
    }
    plan.workers
        .par_iter()
        .map(|w| {
            let a_blocks = w
                .a_tasks
                .iter()
                .map(|t| combine(a, &t.terms()))
                .collect::<Result<Vec<_>>>()?;
            let b_terms: Vec<(usize, f64)> = w
                .b
                .support
                .iter()
                .copied()
                .zip(w.b.coefficients.iter().copied())
                .collect();
            Ok(WorkerPayload {
                worker: w.worker,
                a_blocks,
                b_block: combine(b, &b_terms)?,
            })
        })
        .collect()
}

impl WorkerPayload<'_> {
    /// The worker's block products in execution order.
    pub fn products(&self) -> Result<Vec<GramProduct>> {
        self.a_blocks
            .iter()
            .map(|a| gram_product(a, &self.b_block))
            .collect()
    }
}
