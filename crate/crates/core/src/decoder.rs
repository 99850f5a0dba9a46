//! Progress tracking, decodability checks and recovery of `AᵀB`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::encoding::{EncodingPlan, WorkerPayload};
use crate::error::{Error, Result};
use crate::generator::{build_class_systems, ClassSystem};
use crate::linalg::{
    condition_number, default_rel_tol, numerical_rank, solve_least_squares, DenseMatrix,
};

/// How many leading tasks each worker has finished.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProgressLedger {
    tasks: usize,
    completed: Vec<usize>,
}

impl ProgressLedger {
    pub fn new(workers: usize, tasks: usize) -> Self {
        Self {
            tasks,
            completed: vec![0; workers],
        }
    }

    pub fn full(workers: usize, tasks: usize) -> Self {
        Self {
            tasks,
            completed: vec![tasks; workers],
        }
    }

    pub fn from_counts(counts: Vec<usize>, tasks: usize) -> Result<Self> {
        if let Some((w, &t)) = counts.iter().enumerate().find(|(_, t)| **t > tasks) {
            return Err(Error::InvalidParameter(format!(
                "worker {w} cannot have finished {t} of {tasks} tasks"
            )));
        }
        Ok(Self {
            tasks,
            completed: counts,
        })
    }

    /// Finished workers are the listed ones; everyone else has done nothing.
    pub fn from_survivors(workers: usize, tasks: usize, survivors: &[usize]) -> Self {
        let mut l = Self::new(workers, tasks);
        for &s in survivors {
            l.completed[s] = tasks;
        }
        l
    }

    pub fn record_completion(&mut self, worker: usize) -> Result<()> {
        let t = self
            .completed
            .get_mut(worker)
            .ok_or_else(|| Error::InvalidParameter(format!("no worker {worker}")))?;
        if *t >= self.tasks {
            return Err(Error::WorkerFinished(worker));
        }
        *t += 1;
        Ok(())
    }

    pub fn completed(&self, worker: usize) -> usize {
        self.completed[worker]
    }

    pub fn counts(&self) -> &[usize] {
        &self.completed
    }

    pub fn total(&self) -> usize {
        self.completed.iter().sum()
    }

    pub fn is_finished(&self, worker: usize) -> bool {
        self.completed[worker] == self.tasks
    }

    pub fn workers(&self) -> usize {
        self.completed.len()
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }
}

/// Per-class ranks of the available equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodabilityReport {
    pub ranks: Vec<usize>,
    pub required: usize,
    pub decodable: bool,
}

impl std::fmt::Display for DecodabilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "decodable {}", self.decodable)?;
        writeln!(f, "required_rank {}", self.required)?;
        for (m, r) in self.ranks.iter().enumerate() {
            writeln!(f, "class {m} rank {r}")?;
        }
        Ok(())
    }
}

/// A finished block product reported by a worker.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedProduct {
    pub worker: usize,
    pub location: usize,
    pub value: DenseMatrix,
}

impl CompletedProduct {
    /// Every product of every payload.
    pub fn all_from(payloads: &[WorkerPayload<'_>]) -> Result<Vec<CompletedProduct>> {
        let per_worker: Vec<Vec<CompletedProduct>> = payloads
            .par_iter()
            .map(|p| {
                Ok(p.products()?
                    .into_iter()
                    .enumerate()
                    .map(|(location, g)| CompletedProduct {
                        worker: p.worker,
                        location,
                        value: g.value,
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(per_worker.into_iter().flatten().collect())
    }
}

/// `AᵀB` reassembled from the class solutions.
#[derive(Debug, Clone)]
pub struct RecoveredResult {
    /// `Δ_A * block_rows x kb * block_cols`.
    pub product: DenseMatrix,
    pub residuals: Vec<f64>,
    pub conditions: Vec<f64>,
}

impl RecoveredResult {
    /// Drop the rows and columns that came from padding.
    pub fn trim(&self, rows: usize, cols: usize) -> DenseMatrix {
        self.product.window(0, 0, rows, cols)
    }
}

/// Decoder with the class systems of one plan precomputed.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    plan: &'a EncodingPlan,
    systems: Vec<ClassSystem>,
}

impl<'a> Decoder<'a> {
    pub fn new(plan: &'a EncodingPlan) -> Self {
        Self {
            plan,
            systems: build_class_systems(plan),
        }
    }

    pub fn plan(&self) -> &EncodingPlan {
        self.plan
    }

    pub fn systems(&self) -> &[ClassSystem] {
        &self.systems
    }

    /// Workers whose class-`m` product is available under `counts`.
    pub fn available(&self, m: usize, counts: &[usize]) -> Vec<usize> {
        let locs = &self.systems[m].locations;
        (0..counts.len()).filter(|&j| counts[j] > locs[j]).collect()
    }

    pub fn class_rank(&self, m: usize, counts: &[usize]) -> usize {
        let cols = self.available(m, counts);
        let g = self.systems[m].g.select_columns(&cols);
        numerical_rank(&g, default_rel_tol(g.rows(), g.cols()))
    }

    pub fn report(&self, ledger: &ProgressLedger) -> DecodabilityReport {
        let required = self.plan.derived.class_unknowns();
        let ranks: Vec<usize> = (0..self.systems.len())
            .map(|m| self.class_rank(m, ledger.counts()))
            .collect();
        DecodabilityReport {
            decodable: ranks.iter().all(|r| *r == required),
            ranks,
            required,
        }
    }

    /// Same verdict as [`Decoder::report`], stopping at the first short class.
    pub fn is_decodable(&self, counts: &[usize]) -> bool {
        let required = self.plan.derived.class_unknowns();
        (0..self.systems.len()).all(|m| {
            self.available(m, counts).len() >= required && self.class_rank(m, counts) == required
        })
    }

    pub fn decode(
        &self,
        ledger: &ProgressLedger,
        products: &[CompletedProduct],
    ) -> Result<RecoveredResult> {
        let d = &self.plan.derived;
        let lookup: HashMap<(usize, usize), &DenseMatrix> = products
            .iter()
            .map(|p| ((p.worker, p.location), &p.value))
            .collect();
        let shape = products
            .first()
            .map(|p| p.value.shape())
            .ok_or(Error::TooFewSurvivors {
                got: 0,
                needed: d.threshold,
            })?;
        if let Some(p) = products.iter().find(|p| p.value.shape() != shape) {
            return Err(Error::DimensionMismatch(format!(
                "product of worker {} at location {} is {:?}, expected {shape:?}",
                p.worker,
                p.location,
                p.value.shape()
            )));
        }
        let (br, bc) = shape;
        let l = d.tasks_per_worker;
        let k = d.class_unknowns();

        let solved: Vec<(usize, DenseMatrix, f64, f64)> = (0..l)
            .into_par_iter()
            .map(|m| {
                let sys = &self.systems[m];
                let workers = self.available(m, ledger.counts());
                let eqs = sys.g.select_columns(&workers).transpose();
                let rank = numerical_rank(&eqs, default_rel_tol(eqs.rows(), eqs.cols()));
                if rank < k {
                    return Err(Error::RankDeficient {
                        rank,
                        required: k,
                        context: format!("class {m}"),
                    });
                }
                let mut rhs = DenseMatrix::zeros(workers.len(), br * bc);
                for (row, &w) in workers.iter().enumerate() {
                    let value = lookup.get(&(w, sys.locations[w])).ok_or(Error::MissingProduct {
                        worker: w,
                        location: sys.locations[w],
                    })?;
                    rhs.as_mut_slice()[row * br * bc..(row + 1) * br * bc]
                        .copy_from_slice(value.as_slice());
                }
                let ls = solve_least_squares(&eqs, &rhs)?;
                Ok((m, ls.solution, ls.residual, condition_number(&eqs)))
            })
            .collect::<Result<_>>()?;

        let mut product = DenseMatrix::zeros(d.a_blocks * br, d.kb * bc);
        let mut residuals = vec![0.0; l];
        let mut conditions = vec![0.0; l];
        for (m, solution, residual, cond) in solved {
            residuals[m] = residual;
            conditions[m] = cond;
            for row in 0..k {
                let (alpha, beta) = (row / d.kb, row % d.kb);
                let block = DenseMatrix::from_row_major(br, bc, solution.row(row).to_vec())?;
                product.paste((alpha * l + m) * br, beta * bc, &block);
            }
        }
        Ok(RecoveredResult {
            product,
            residuals,
            conditions,
        })
    }

    pub fn decode_from_survivors(
        &self,
        products: &[CompletedProduct],
        survivors: &[usize],
    ) -> Result<RecoveredResult> {
        let d = &self.plan.derived;
        let mut survivors = survivors.to_vec();
        survivors.sort_unstable();
        survivors.dedup();
        if survivors.len() < d.threshold {
            return Err(Error::TooFewSurvivors {
                got: survivors.len(),
                needed: d.threshold,
            });
        }
        let ledger = ProgressLedger::from_survivors(d.n, d.tasks_per_worker, &survivors);
        self.decode(&ledger, products)
    }
}

pub fn is_decodable(ledger: &ProgressLedger, plan: &EncodingPlan) -> DecodabilityReport {
    Decoder::new(plan).report(ledger)
}

pub fn decode(
    ledger: &ProgressLedger,
    products: &[CompletedProduct],
    plan: &EncodingPlan,
) -> Result<RecoveredResult> {
    Decoder::new(plan).decode(ledger, products)
}

pub fn decode_from_survivors(
    plan: &EncodingPlan,
    products: &[CompletedProduct],
    survivors: &[usize],
) -> Result<RecoveredResult> {
    Decoder::new(plan).decode_from_survivors(products, survivors)
}
