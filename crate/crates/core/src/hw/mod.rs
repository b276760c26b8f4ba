//! Cycle-accurate behavioral model of the hardware HEFT_RT scheduler.
//!
//! The model follows the datapath cycle by cycle: tasks stream into a
//! shift-register priority queue at one task per cycle, the queue sorts
//! itself by odd-even transposition until two consecutive cycles see no
//! swap, and then drains one task per cycle through the PE handlers and the
//! EFT comparator tree. A final cycle flushes the pipeline and returns the
//! scheduler to idle, so an event of `n` tasks takes at most `3n + 3` cycles
//! and produces its first decision within `2n + 3`.
//!
//! All times inside the scheduler are quantized to `w_avg`-bit scheduler
//! units (see [`quantize`]); availability registers are `w_avg + 16` bits
//! wide (capped at 64) and saturate instead of wrapping.

mod handler;
mod queue;
mod scheduler;

pub use handler::{eft_select, ExecEntry, PeHandlers};
pub use queue::{Parity, PriorityQueue, QueueCell};
pub use scheduler::{write_cycle_trace, CycleStats, EventOutcome, HwScheduler, Phase, TraceRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ExecTime, TaskRecord};
use crate::sw::ReadyTask;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HwError {
    #[error("invalid scheduler configuration: {0}")]
    InvalidConfig(String),
    #[error("operation needs phase {expected}, scheduler is in {actual:?}")]
    WrongPhase {
        expected: &'static str,
        actual: Phase,
    },
    #[error("priority queue is full")]
    QueueFull,
    #[error("event of {n} tasks does not fit a queue of depth {depth}")]
    EventTooLarge { n: usize, depth: usize },
    #[error("mapping event has no tasks")]
    EmptyEvent,
    #[error("got {got} PE values, scheduler has {expected} PEs")]
    PeCountMismatch { got: usize, expected: usize },
}

/// Static parameters of one scheduler instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwConfig {
    /// Number of PEs.
    pub p: usize,
    /// Priority queue depth.
    pub d: usize,
    /// Bit width of average and execution-time values.
    pub w_avg: u32,
    pub clock_period_ps: u64,
    /// Nanoseconds per scheduler time unit.
    pub time_unit_ns: u64,
}

impl Default for HwConfig {
    fn default() -> Self {
        HwConfig {
            p: 4,
            d: 512,
            w_avg: 16,
            clock_period_ps: 3_048,
            time_unit_ns: 1_000,
        }
    }
}

impl HwConfig {
    pub fn validate(&self) -> Result<(), HwError> {
        let bad = |msg: String| Err(HwError::InvalidConfig(msg));
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.d > u32::MAX as usize {
            return bad(format!("d = {} exceeds the qid range", self.d));
        }
        if !(4..=64).contains(&self.w_avg) {
            return bad(format!("w_avg = {} outside [4, 64]", self.w_avg));
        }
        if self.clock_period_ps == 0 {
            return bad("clock period must be positive".into());
        }
        if self.time_unit_ns == 0 {
            return bad("time unit must be positive".into());
        }
        Ok(())
    }

    /// `ceil(log2(d))`.
    pub fn w_qid(&self) -> u32 {
        usize::BITS - (self.d.max(1) - 1).leading_zeros()
    }

    /// Width of the availability registers.
    pub fn w_accum(&self) -> u32 {
        (self.w_avg + 16).min(64)
    }

    /// Largest representable execution time, also the "unsupported" sentinel.
    pub fn exec_max(&self) -> u64 {
        max_for_width(self.w_avg)
    }

    pub fn accum_max(&self) -> u64 {
        max_for_width(self.w_accum())
    }
}

fn max_for_width(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Result of quantizing one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantized {
    pub value: u64,
    pub saturated: bool,
}

fn round_div(t: u64, unit: u64) -> u64 {
    // round half up without overflowing near u64::MAX
    t / unit + u64::from(t % unit >= unit - unit / 2)
}

/// Nanoseconds to `w_avg`-bit scheduler units, rounding half up and
/// saturating at `2^w_avg - 1`.
pub fn quantize(t_ns: u64, config: &HwConfig) -> Quantized {
    quantize_to(t_ns, config.time_unit_ns, config.exec_max())
}

/// Same rounding, saturating at the availability register width.
pub fn quantize_avail(t_ns: u64, config: &HwConfig) -> Quantized {
    quantize_to(t_ns, config.time_unit_ns, config.accum_max())
}

fn quantize_to(t_ns: u64, unit: u64, max: u64) -> Quantized {
    let units = round_div(t_ns, unit);
    if units > max {
        Quantized {
            value: max,
            saturated: true,
        }
    } else {
        Quantized {
            value: units,
            saturated: false,
        }
    }
}

pub fn quantize_exec(t: ExecTime, config: &HwConfig) -> (ExecEntry, bool) {
    match t {
        Some(ns) => {
            let q = quantize(ns, config);
            (
                ExecEntry {
                    value: q.value,
                    supported: true,
                },
                q.saturated,
            )
        }
        None => (
            ExecEntry {
                value: config.exec_max(),
                supported: false,
            },
            false,
        ),
    }
}

/// The task exactly as the hardware sees it, in scheduler units, for feeding
/// the software reference on identical inputs.
pub fn quantized_ready_task(rec: &TaskRecord, config: &HwConfig) -> ReadyTask {
    ReadyTask {
        tid: rec.tid(),
        avg: quantize(rec.avg(), config).value,
        exec: rec
            .exec()
            .iter()
            .map(|t| t.map(|ns| quantize(ns, config).value))
            .collect(),
    }
}

/// Upper bound on the cycles of an `n`-task event.
pub fn worst_case_cycles(n: usize) -> u64 {
    3 * n as u64 + 3
}

/// Upper bound on the cycle of the first decision of an `n`-task event.
pub fn worst_case_first_decision(n: usize) -> u64 {
    2 * n as u64 + 3
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventLatency {
    pub total_ns: f64,
    pub per_task_ns: f64,
}

pub fn event_latency_ns(stats: &CycleStats, config: &HwConfig) -> EventLatency {
    let total_ns = stats.total_cycles as f64 * config.clock_period_ps as f64 / 1_000.0;
    EventLatency {
        total_ns,
        per_task_ns: total_ns / stats.tasks.max(1) as f64,
    }
}

/// Event compute time in whole nanoseconds, rounded half up.
pub fn event_compute_ns(cycles: u64, config: &HwConfig) -> u64 {
    let ps = cycles as u128 * config.clock_period_ps as u128;
    ((ps + 500) / 1_000) as u64
}

/// Per-decision latency as the queue grows without bound, in picoseconds:
/// `(3n + 3) / n` cycles tends to 3.
pub fn asymptotic_decision_ps(config: &HwConfig) -> u64 {
    3 * config.clock_period_ps
}
