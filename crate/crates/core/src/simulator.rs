//! Discrete-event replay of workers running their task lists.
//!
//! Worker `i` finishes its `k`-th task at `(Σ_{j<=k} (cost_ij + overhead)) / speed_i`.
//! Events are ordered by `(time, worker, location)` and the decode time is
//! the time of the shortest event prefix whose progress is decodable.
//! Central decoding cost is not included.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::cost::{effective_density, product_flops};
use crate::baseline::PolyCodePlan;
use crate::decoder::Decoder;
use crate::encoding::EncodingPlan;
use crate::error::{Error, Result};
use crate::linalg::{gram_flops, Matrix, PartitionedMatrix};
use crate::synthetic::rng_from_seed;

/// Anything whose progress can be replayed and checked for decodability.
pub trait Schedule: Sync {
    fn label(&self) -> String;
    fn workers(&self) -> usize;
    fn tasks(&self, worker: usize) -> usize;
    fn class_at(&self, worker: usize, location: usize) -> usize;
    /// `counts[i]` leading tasks of worker `i` are done.
    fn is_decodable(&self, counts: &[usize]) -> bool;
}

impl Schedule for Decoder<'_> {
    fn label(&self) -> String {
        "proposed".into()
    }

    fn workers(&self) -> usize {
        self.plan().n()
    }

    fn tasks(&self, _worker: usize) -> usize {
        self.plan().tasks_per_worker()
    }

    fn class_at(&self, worker: usize, location: usize) -> usize {
        self.plan().class_at(worker, location)
    }

    fn is_decodable(&self, counts: &[usize]) -> bool {
        Decoder::is_decodable(self, counts)
    }
}

impl Schedule for PolyCodePlan {
    fn label(&self) -> String {
        "polynomial".into()
    }

    fn workers(&self) -> usize {
        self.n
    }

    fn tasks(&self, _worker: usize) -> usize {
        1
    }

    fn class_at(&self, _worker: usize, _location: usize) -> usize {
        0
    }

    fn is_decodable(&self, counts: &[usize]) -> bool {
        counts.iter().filter(|c| **c >= 1).count() >= self.threshold()
    }
}

/// Per-worker speed; `1.0` is nominal and `0.0` a failed worker.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    pub speeds: Vec<f64>,
}

impl SpeedProfile {
    pub fn nominal(n: usize) -> Self {
        Self {
            speeds: vec![1.0; n],
        }
    }

    pub fn from_speeds(speeds: Vec<f64>) -> Result<Self> {
        if let Some((worker, &speed)) = speeds
            .iter()
            .enumerate()
            .find(|(_, s)| !s.is_finite() || **s < 0.0)
        {
            return Err(Error::InvalidSpeed { worker, speed });
        }
        Ok(Self { speeds })
    }

    /// Workers `0..count` run at `factor`.
    pub fn with_stragglers(n: usize, count: usize, factor: f64) -> Result<Self> {
        let stragglers: Vec<usize> = (0..count.min(n)).collect();
        Self::with_straggler_set(n, &stragglers, factor)
    }

    /// `count` workers chosen by a seeded shuffle run at `factor`.
    pub fn with_random_stragglers(n: usize, count: usize, factor: f64, seed: u64) -> Result<Self> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng_from_seed(seed));
        Self::with_straggler_set(n, &order[..count.min(n)], factor)
    }

    pub fn with_straggler_set(n: usize, stragglers: &[usize], factor: f64) -> Result<Self> {
        let mut speeds = vec![1.0; n];
        for &s in stragglers {
            speeds[s] = factor;
        }
        Self::from_speeds(speeds)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::from_speeds(self.speeds.iter().map(|s| s * lambda).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostModel {
    Unit,
    NnzFlop,
    AnalyticDensity,
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::Unit => "unit",
            CostModel::NnzFlop => "nnz",
            CostModel::AnalyticDensity => "analytic",
        })
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(CostModel::Unit),
            "nnz" => Ok(CostModel::NnzFlop),
            "analytic" => Ok(CostModel::AnalyticDensity),
            other => Err(Error::InvalidParameter(format!("unknown cost model {other:?}"))),
        }
    }
}

/// Cost of every task, `costs[worker][location]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskCosts {
    pub model: CostModel,
    pub costs: Vec<Vec<f64>>,
}

impl TaskCosts {
    pub fn unit(schedule: &dyn Schedule) -> Self {
        Self {
            model: CostModel::Unit,
            costs: (0..schedule.workers())
                .map(|i| vec![1.0; schedule.tasks(i)])
                .collect(),
        }
    }

    /// Flop counts of the proposed scheme's products on real blocks.
    pub fn measured_proposed(
        plan: &EncodingPlan,
        a: &PartitionedMatrix,
        b: &PartitionedMatrix,
    ) -> Result<Self> {
        let payloads = crate::encoding::encode_blocks(a, b, plan)?;
        let costs = payloads
            .par_iter()
            .map(|p| {
                p.a_blocks
                    .iter()
                    .map(|blk| gram_flops(blk, &p.b_block).map(|f| f as f64))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: CostModel::NnzFlop,
            costs,
        })
    }

    /// Flop counts of the polynomial code's products on real blocks.
    pub fn measured_poly(
        plan: &PolyCodePlan,
        a: &PartitionedMatrix,
        b: &PartitionedMatrix,
    ) -> Result<Self> {
        let encoded = crate::baseline::poly_encode(plan, a, b)?;
        let costs = encoded
            .par_iter()
            .map(|(ea, eb): &(Matrix, Matrix)| gram_flops(ea, eb).map(|f| vec![f as f64]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: CostModel::NnzFlop,
            costs,
        })
    }

    /// Closed-form costs: a weight-`w` block has density `min(1, w η)`.
    pub fn analytic_proposed(plan: &EncodingPlan, t: usize, r: usize, w: usize, density: f64) -> Self {
        let d = &plan.derived;
        let ca = r as f64 / d.a_blocks as f64;
        let cb = w as f64 / d.kb as f64;
        let costs = plan
            .workers
            .iter()
            .map(|wp| {
                let db = effective_density(wp.b.support.len(), density);
                wp.a_tasks
                    .iter()
                    .map(|task| {
                        let da = effective_density(task.weight(), density);
                        product_flops(t as f64, ca, cb, da, db)
                    })
                    .collect()
            })
            .collect();
        Self {
            model: CostModel::AnalyticDensity,
            costs,
        }
    }

    pub fn analytic_poly(plan: &PolyCodePlan, t: usize, r: usize, w: usize, density: f64) -> Self {
        let ca = r as f64 / plan.ka as f64;
        let cb = w as f64 / plan.kb as f64;
        let costs = plan
            .weights()
            .into_iter()
            .map(|(wa, wb)| {
                vec![product_flops(
                    t as f64,
                    ca,
                    cb,
                    effective_density(wa, density),
                    effective_density(wb, density),
                )]
            })
            .collect();
        Self {
            model: CostModel::AnalyticDensity,
            costs,
        }
    }

    pub fn worker_total(&self, worker: usize) -> f64 {
        self.costs[worker].iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub worker: usize,
    pub location: usize,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub events: Vec<Event>,
    /// `+inf` for failed workers.
    pub finish_times: Vec<f64>,
}

/// Replay with no per-product overhead.
pub fn simulate_timeline(
    schedule: &dyn Schedule,
    speeds: &SpeedProfile,
    costs: &TaskCosts,
) -> Result<Timeline> {
    simulate_timeline_with_overhead(schedule, speeds, costs, 0.0)
}

pub fn simulate_timeline_with_overhead(
    schedule: &dyn Schedule,
    speeds: &SpeedProfile,
    costs: &TaskCosts,
    overhead: f64,
) -> Result<Timeline> {
    let n = schedule.workers();
    if speeds.speeds.len() != n || costs.costs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} workers but {} speeds and {} cost rows",
            speeds.speeds.len(),
            costs.costs.len()
        )));
    }
    let mut events = Vec::new();
    let mut finish_times = vec![f64::INFINITY; n];
    for (worker, &speed) in speeds.speeds.iter().enumerate() {
        if !speed.is_finite() || speed < 0.0 {
            return Err(Error::InvalidSpeed { worker, speed });
        }
        if costs.costs[worker].len() != schedule.tasks(worker) {
            return Err(Error::DimensionMismatch(format!(
                "worker {worker} has {} tasks but {} costs",
                schedule.tasks(worker),
                costs.costs[worker].len()
            )));
        }
        if speed == 0.0 {
            continue;
        }
        let mut work = 0.0;
        for (location, cost) in costs.costs[worker].iter().enumerate() {
            work += cost + overhead;
            events.push(Event {
                time: work / speed,
                worker,
                location,
                class: schedule.class_at(worker, location),
            });
        }
        finish_times[worker] = work / speed;
    }
    events.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.worker.cmp(&b.worker))
            .then(a.location.cmp(&b.location))
    });
    Ok(Timeline {
        events,
        finish_times,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeTime {
    /// `+inf` when even the full timeline is not decodable.
    pub time: f64,
    pub products_used: usize,
}

fn counts_after(timeline: &Timeline, n: usize, prefix: usize) -> Vec<usize> {
    let mut counts = vec![0; n];
    for e in &timeline.events[..prefix] {
        counts[e.worker] += 1;
    }
    counts
}

pub fn time_to_decode(timeline: &Timeline, schedule: &dyn Schedule) -> DecodeTime {
    let n = schedule.workers();
    let total = timeline.events.len();
    if !schedule.is_decodable(&counts_after(timeline, n, total)) {
        return DecodeTime {
            time: f64::INFINITY,
            products_used: total,
        };
    }
    // Decodability is monotone in the prefix length.
    let (mut lo, mut hi) = (0usize, total);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if schedule.is_decodable(&counts_after(timeline, n, mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    DecodeTime {
        time: if lo == 0 { 0.0 } else { timeline.events[lo - 1].time },
        products_used: lo,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: String,
    pub straggler_count: usize,
    pub straggler_factor: f64,
    pub cost_model: String,
    pub decode_time: f64,
    pub products_used: usize,
}

/// One schedule under comparison with its task costs.
pub struct SweepEntry<'a> {
    pub schedule: &'a dyn Schedule,
    pub costs: &'a TaskCosts,
}

/// Decode times of every entry for each straggler count; workers
/// `0..count` run at `factor`.
pub fn compare_overall(
    entries: &[SweepEntry<'_>],
    straggler_counts: &[usize],
    factor: f64,
) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, usize)> = (0..entries.len())
        .flat_map(|e| straggler_counts.iter().map(move |&c| (e, c)))
        .collect();
    jobs.par_iter()
        .map(|&(e, count)| {
            let entry = &entries[e];
            let n = entry.schedule.workers();
            let speeds = SpeedProfile::with_stragglers(n, count, factor)?;
            let timeline = simulate_timeline(entry.schedule, &speeds, entry.costs)?;
            let t = time_to_decode(&timeline, entry.schedule);
            Ok(SweepRow {
                scheme: entry.schedule.label(),
                straggler_count: count,
                straggler_factor: factor,
                cost_model: entry.costs.model.to_string(),
                decode_time: t.time,
                products_used: t.products_used,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
