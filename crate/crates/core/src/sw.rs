//! Software schedulers: the HEFT_RT reference, a FIFO baseline, an exhaustive
//! makespan oracle for tiny ready queues, and the analytic cost model of the
//! software scheduler.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ExecTime, MappingDecision, TaskRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchedError {
    #[error("ready queue is empty")]
    EmptyReady,
    #[error("task {tid} has {got} execution times but there are {expected} PEs")]
    PeCountMismatch {
        tid: u64,
        got: usize,
        expected: usize,
    },
    #[error("task {tid} has no supported PE")]
    NoSupportedPe { tid: u64 },
    #[error("instance too large for exhaustive search: {tasks} tasks on {pes} PEs")]
    TooLarge { tasks: usize, pes: usize },
}

/// A task as the scheduler sees it. Times are in whatever unit the caller
/// chose (raw nanoseconds, or quantized scheduler units).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadyTask {
    pub tid: u64,
    pub avg: u64,
    pub exec: Vec<ExecTime>,
}

impl From<&TaskRecord> for ReadyTask {
    fn from(rec: &TaskRecord) -> Self {
        ReadyTask {
            tid: rec.tid(),
            avg: rec.avg(),
            exec: rec.exec().to_vec(),
        }
    }
}

/// The ready queue in arrival order plus the current availability of every
/// PE. Finish times saturate at `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulerInput {
    ready: Vec<ReadyTask>,
    avail: Vec<u64>,
    limit: u64,
}

impl SchedulerInput {
    pub fn new(ready: Vec<ReadyTask>, avail: Vec<u64>) -> Result<Self, SchedError> {
        Self::with_limit(ready, avail, u64::MAX)
    }

    pub fn with_limit(
        ready: Vec<ReadyTask>,
        avail: Vec<u64>,
        limit: u64,
    ) -> Result<Self, SchedError> {
        if ready.is_empty() {
            return Err(SchedError::EmptyReady);
        }
        for t in &ready {
            if t.exec.len() != avail.len() {
                return Err(SchedError::PeCountMismatch {
                    tid: t.tid,
                    got: t.exec.len(),
                    expected: avail.len(),
                });
            }
            if t.exec.iter().all(Option::is_none) {
                return Err(SchedError::NoSupportedPe { tid: t.tid });
            }
        }
        let avail = avail.into_iter().map(|a| a.min(limit)).collect();
        Ok(SchedulerInput {
            ready,
            avail,
            limit,
        })
    }

    pub fn ready(&self) -> &[ReadyTask] {
        &self.ready
    }

    pub fn avail(&self) -> &[u64] {
        &self.avail
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Decisions in the order the tasks were dequeued.
    pub decisions: Vec<MappingDecision>,
    pub final_avail: Vec<u64>,
}

impl Schedule {
    /// Latest predicted finish over all decisions.
    pub fn makespan(&self) -> u64 {
        self.decisions
            .iter()
            .map(|d| d.predicted_finish)
            .max()
            .unwrap_or(0)
    }
}

/// Lowest finish time over supported PEs; ties go to the lowest index.
fn earliest_finish(exec: &[ExecTime], avail: &[u64], limit: u64) -> (usize, u64) {
    let mut best: Option<(usize, u64)> = None;
    for (pe, (t, &a)) in exec.iter().zip(avail).enumerate() {
        let Some(t) = t else { continue };
        let finish = a.saturating_add(*t).min(limit);
        if best.is_none_or(|(_, f)| finish < f) {
            best = Some((pe, finish));
        }
    }
    best.expect("validated: at least one supported PE")
}

fn list_schedule<'a>(
    order: impl Iterator<Item = &'a ReadyTask>,
    input: &SchedulerInput,
) -> Schedule {
    let mut avail = input.avail.clone();
    let decisions = order
        .map(|task| {
            let (pe, finish) = earliest_finish(&task.exec, &avail, input.limit);
            avail[pe] = finish;
            MappingDecision {
                tid: task.tid,
                pe,
                predicted_finish: finish,
            }
        })
        .collect();
    Schedule {
        decisions,
        final_avail: avail,
    }
}

/// HEFT_RT: order the ready queue by descending average execution time (ties
/// keep queue order), then give each task the PE with the earliest finish.
pub fn heft_rt_schedule(input: &SchedulerInput) -> Schedule {
    let mut order: Vec<&ReadyTask> = input.ready.iter().collect();
    // stable sort
    order.sort_by_key(|t| std::cmp::Reverse(t.avg));
    list_schedule(order.into_iter(), input)
}

/// Earliest-finish mapping in plain queue order.
pub fn fifo_schedule(input: &SchedulerInput) -> Schedule {
    list_schedule(input.ready.iter(), input)
}

pub const BRUTE_FORCE_MAX_TASKS: usize = 8;
pub const BRUTE_FORCE_MAX_PES: usize = 4;

/// Exhaustive minimum makespan for a small ready queue.
///
/// Ready tasks are mutually independent, so for a fixed task→PE assignment
/// every dequeue order yields the same per-PE totals and thus the same
/// makespan; enumerating the `P^n` assignments covers every list schedule.
/// Returns the lexicographically first optimal assignment.
pub fn brute_force_best_assignment(
    input: &SchedulerInput,
) -> Result<(Vec<usize>, u64), SchedError> {
    let n = input.ready.len();
    let p = input.avail.len();
    if n > BRUTE_FORCE_MAX_TASKS || p > BRUTE_FORCE_MAX_PES {
        return Err(SchedError::TooLarge { tasks: n, pes: p });
    }

    let mut assignment = vec![0usize; n];
    let mut best: Option<(Vec<usize>, u64)> = None;
    loop {
        if let Some(span) = assignment_makespan(input, &assignment) {
            if best.as_ref().is_none_or(|(_, b)| span < *b) {
                best = Some((assignment.clone(), span));
            }
        }
        // mixed-radix increment, last task fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best.expect("every task has a supported PE"));
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < p {
                break;
            }
            assignment[i] = 0;
        }
    }
}

fn assignment_makespan(input: &SchedulerInput, assignment: &[usize]) -> Option<u64> {
    let mut avail = input.avail.clone();
    let mut span = 0;
    for (task, &pe) in input.ready.iter().zip(assignment) {
        let t = task.exec[pe]?;
        avail[pe] = avail[pe].saturating_add(t).min(input.limit);
        span = span.max(avail[pe]);
    }
    Some(span)
}

/// Cost coefficients of the software scheduler, in nanoseconds:
/// `fixed + per_task * n + per_compare * n * log2(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftwareCoeffs {
    pub fixed_ns: f64,
    pub per_task_ns: f64,
    pub per_compare_ns: f64,
}

impl Default for SoftwareCoeffs {
    fn default() -> Self {
        SoftwareCoeffs {
            fixed_ns: 5_000.0,
            per_task_ns: 60_000.0,
            per_compare_ns: 3_000.0,
        }
    }
}

pub fn sw_overhead_model(n: usize, coeffs: &SoftwareCoeffs) -> u64 {
    let n = n.max(1) as f64;
    let ns = coeffs.fixed_ns + coeffs.per_task_ns * n + coeffs.per_compare_ns * n * n.log2();
    ns.round() as u64
}
