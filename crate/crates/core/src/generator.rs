//! Generator matrices of the per-class decoding systems.
//!
//! For class `m`, worker `j` contributes one equation: its product at the
//! location holding class `m` equals `Σ_{α,β} G_A[α, j] G_B[β, j] A_{αℓ+m}ᵀ B_β`.
//! The coefficients form column `j` of `G = G_A ⊙ G_B`, and unknown
//! `A_{αℓ+m}ᵀ B_β` is row `α * kb + β`.

use crate::encoding::{appearance_sets, ATask, EncodingPlan};
use crate::error::{Error, Result};
use crate::linalg::{khatri_rao_columns, DenseMatrix};

/// `kb x n` matrix of `B` coefficients, column `j` belonging to worker `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BGenerator {
    pub gb: DenseMatrix,
}

impl BGenerator {
    /// Row indices of the nonzeros of column `worker`.
    pub fn support(&self, worker: usize) -> Vec<usize> {
        (0..self.gb.rows())
            .filter(|&r| self.gb.get(r, worker) != 0.0)
            .collect()
    }
}

pub fn build_gb(plan: &EncodingPlan) -> BGenerator {
    let mut gb = DenseMatrix::zeros(plan.derived.kb, plan.n());
    for w in &plan.workers {
        for (&row, &c) in w.b.support.iter().zip(&w.b.coefficients) {
            if row < plan.derived.kb {
                let cur = gb.get(row, w.worker);
                gb.set(row, w.worker, cur + c);
            }
        }
    }
    BGenerator { gb }
}

/// The decoding system of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSystem {
    pub class: usize,
    /// `ka x n`.
    pub ga: DenseMatrix,
    /// `kb x n`.
    pub gb: DenseMatrix,
    /// `ka*kb x n`.
    pub g: DenseMatrix,
    /// Location of the class at each worker, `ℓ` when absent.
    pub locations: Vec<usize>,
}

impl ClassSystem {
    /// Workers whose column of `G_A` is a plain indicator.
    pub fn uncoded_workers(&self) -> Vec<usize> {
        (0..self.ga.cols())
            .filter(|&j| {
                let col = self.ga.column(j);
                col.iter().filter(|v| **v != 0.0).count() == 1 && col.contains(&1.0)
            })
            .collect()
    }

    /// Label `(α, β)` of unknown row `r`.
    pub fn unknown_label(&self, row: usize) -> (usize, usize) {
        (row / self.gb.rows(), row % self.gb.rows())
    }

    pub fn unknowns(&self) -> usize {
        self.g.rows()
    }
}

/// Build the system of class `m` (`m < ℓ`). Support members outside the
/// class are ignored here; the property verifiers report them.
pub fn build_class_system(plan: &EncodingPlan, m: usize) -> ClassSystem {
    build_class_system_with(plan, m, &build_gb(plan))
}

pub fn build_class_system_with(plan: &EncodingPlan, m: usize, gb: &BGenerator) -> ClassSystem {
    let d = &plan.derived;
    let l = d.tasks_per_worker;
    let mut ga = DenseMatrix::zeros(d.ka, plan.n());
    let mut locations = vec![l; plan.n()];
    for w in &plan.workers {
        let Some(loc) = plan.location_of(w.worker, m) else {
            continue;
        };
        locations[w.worker] = loc;
        for (idx, c) in w.a_tasks[loc].terms() {
            if idx % l == m && idx / l < d.ka {
                let cur = ga.get(idx / l, w.worker);
                ga.set(idx / l, w.worker, cur + c);
            }
        }
    }
    let g = khatri_rao_columns(&ga, &gb.gb).expect("both factors have n columns");
    ClassSystem {
        class: m,
        ga,
        gb: gb.gb.clone(),
        g,
        locations,
    }
}

pub fn build_class_systems(plan: &EncodingPlan) -> Vec<ClassSystem> {
    let gb = build_gb(plan);
    (0..plan.tasks_per_worker())
        .map(|m| build_class_system_with(plan, m, &gb))
        .collect()
}

/// `B` coefficients of every worker holding `A_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiMatrix {
    pub block: usize,
    /// Workers in `U_i ∪ V_i`, ascending; column `k` belongs to `workers[k]`.
    pub workers: Vec<usize>,
    /// `kb x |U_i ∪ V_i|`.
    pub r: DenseMatrix,
}

impl RiMatrix {
    pub fn types(&self, kb: usize) -> Vec<usize> {
        self.workers.iter().map(|w| w % kb).collect()
    }
}

/// Only defined for `x = 0`.
pub fn extract_ri(plan: &EncodingPlan, block: usize) -> Result<RiMatrix> {
    if plan.derived.x != 0 {
        return Err(Error::Unsupported(
            "R_i matrices are only defined for x = 0".into(),
        ));
    }
    if block >= plan.derived.a_blocks {
        return Err(Error::InvalidParameter(format!("no A block {block}")));
    }
    let gb = build_gb(plan);
    let workers = appearance_sets(plan).all(block);
    Ok(RiMatrix {
        block,
        r: gb.gb.select_columns(&workers),
        workers,
    })
}

/// Which coded task, if any, of `worker` includes block `i`.
pub fn coded_task_containing(plan: &EncodingPlan, worker: usize, block: usize) -> Option<usize> {
    plan.workers[worker].a_tasks.iter().position(|t| match t {
        ATask::Coded { support, .. } => support.contains(&block),
        ATask::Uncoded { .. } => false,
    })
}
