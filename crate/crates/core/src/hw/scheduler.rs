use std::io::{self, Write};

use super::handler::{eft_select, ExecEntry, PeHandlers};
use super::queue::{Parity, PriorityQueue};
use super::{quantize, quantize_avail, quantize_exec, HwConfig, HwError};
use crate::model::{MappingDecision, TaskRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Idle,
    Fill,
    SortOdd,
    SortEven,
    Drain,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Fill => "fill",
            Phase::SortOdd => "sort_odd",
            Phase::SortEven => "sort_even",
            Phase::Drain => "drain",
        }
    }
}

/// Cycle accounting for one mapping event. Cycle numbers are 1-based and
/// count from the first enqueue of the event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycleStats {
    pub tasks: usize,
    pub fill_cycles: u64,
    pub sort_cycles: u64,
    pub drain_cycles: u64,
    pub total_cycles: u64,
    pub first_decision_cycle: u64,
}

/// One line of the optional per-cycle trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub cycle: u64,
    pub phase: Phase,
    /// One flag per compared pair in a sort cycle, empty otherwise.
    pub swaps: Vec<bool>,
    pub decision: Option<MappingDecision>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventOutcome {
    /// Decisions in drain order.
    pub decisions: Vec<MappingDecision>,
    pub stats: CycleStats,
}

/// Microarchitectural state of the scheduler: queue cells, the exec-time and
/// TID stores addressed by qid, the PE handlers, and the sequencing state.
#[derive(Debug, Clone)]
pub struct HwScheduler {
    config: HwConfig,
    queue: PriorityQueue,
    exec_store: Vec<Vec<ExecEntry>>,
    tid_store: Vec<u64>,
    row_valid: Vec<bool>,
    handlers: PeHandlers,
    phase: Phase,
    quiet_count: u8,
    next_qid: u32,
    cycle: u64,
    stats: CycleStats,
    saturations: u64,
    swap_flags: Vec<bool>,
    trace: Option<Vec<TraceRow>>,
}

impl HwScheduler {
    pub fn new(config: HwConfig) -> Result<Self, HwError> {
        config.validate()?;
        Ok(HwScheduler {
            queue: PriorityQueue::new(config.d),
            exec_store: vec![vec![ExecEntry::default(); config.p]; config.d],
            tid_store: vec![0; config.d],
            row_valid: vec![false; config.d],
            handlers: PeHandlers::new(config.p, config.accum_max()),
            phase: Phase::Idle,
            quiet_count: 0,
            next_qid: 0,
            cycle: 0,
            stats: CycleStats::default(),
            saturations: 0,
            swap_flags: Vec::new(),
            trace: None,
            config,
        })
    }

    pub fn config(&self) -> &HwConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn avail(&self) -> &[u64] {
        self.handlers.avail()
    }

    pub fn queue(&self) -> &PriorityQueue {
        &self.queue
    }

    pub fn quiet_count(&self) -> u8 {
        self.quiet_count
    }

    /// Stats of the event in progress, or of the last completed one.
    pub fn stats(&self) -> CycleStats {
        self.stats
    }

    /// Quantizations that hit the saturation ceiling since construction.
    pub fn saturation_events(&self) -> u64 {
        self.saturations
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<TraceRow> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    fn expect_phase(&self, ok: bool, expected: &'static str) -> Result<(), HwError> {
        if ok {
            Ok(())
        } else {
            Err(HwError::WrongPhase {
                expected,
                actual: self.phase,
            })
        }
    }

    fn record(&mut self, swaps: Vec<bool>, decision: Option<MappingDecision>) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRow {
                cycle: self.cycle,
                phase: self.phase,
                swaps,
                decision,
            });
        }
    }

    /// Loads the availability registers, in scheduler units. Takes no cycles.
    pub fn sync_avail(&mut self, times: &[u64]) -> Result<(), HwError> {
        self.expect_phase(self.phase == Phase::Idle, "idle")?;
        if times.len() != self.config.p {
            return Err(HwError::PeCountMismatch {
                got: times.len(),
                expected: self.config.p,
            });
        }
        self.handlers.sync(times);
        Ok(())
    }

    /// Streams one task in: assigns the next qid, pushes (qid, avg) into the
    /// queue and writes the quantized exec row and TID at address qid. One
    /// cycle.
    pub fn enqueue_task(&mut self, rec: &TaskRecord) -> Result<u32, HwError> {
        self.expect_phase(
            matches!(self.phase, Phase::Idle | Phase::Fill),
            "idle or fill",
        )?;
        if rec.pe_count() != self.config.p {
            return Err(HwError::PeCountMismatch {
                got: rec.pe_count(),
                expected: self.config.p,
            });
        }
        if self.queue.is_full() {
            return Err(HwError::QueueFull);
        }
        if self.phase == Phase::Idle {
            self.begin_event();
        }

        let qid = self.next_qid;
        self.next_qid += 1;
        let avg = quantize(rec.avg(), &self.config);
        self.saturations += u64::from(avg.saturated);
        let inserted = self.queue.insert(qid, avg.value);
        debug_assert!(inserted);

        let addr = qid as usize;
        for (slot, &t) in self.exec_store[addr].iter_mut().zip(rec.exec()) {
            let (entry, saturated) = quantize_exec(t, &self.config);
            *slot = entry;
            self.saturations += u64::from(saturated);
        }
        self.tid_store[addr] = rec.tid();
        self.row_valid[addr] = true;

        self.cycle += 1;
        self.stats.tasks += 1;
        self.stats.fill_cycles += 1;
        self.phase = Phase::Fill;
        self.record(Vec::new(), None);
        Ok(qid)
    }

    fn begin_event(&mut self) {
        self.cycle = 0;
        self.next_qid = 0;
        self.quiet_count = 0;
        self.stats = CycleStats::default();
    }

    /// Advances one clock cycle.
    pub fn tick(&mut self) -> Result<Option<MappingDecision>, HwError> {
        self.expect_phase(self.phase != Phase::Idle, "fill, sort or drain")?;
        self.cycle += 1;
        match self.phase {
            Phase::Fill => {
                self.phase = Phase::SortOdd;
                self.sort_cycle();
                Ok(None)
            }
            Phase::SortOdd | Phase::SortEven => {
                self.sort_cycle();
                Ok(None)
            }
            Phase::Drain => Ok(self.drain_cycle()),
            Phase::Idle => unreachable!(),
        }
    }

    fn sort_cycle(&mut self) {
        let parity = match self.phase {
            Phase::SortOdd => Parity::Odd,
            _ => Parity::Even,
        };
        let mut flags = std::mem::take(&mut self.swap_flags);
        let swapped = self.queue.sort_step(parity, &mut flags);
        self.stats.sort_cycles += 1;
        self.quiet_count = if swapped { 0 } else { self.quiet_count + 1 };
        if self.trace.is_some() {
            self.record(flags.clone(), None);
        }
        self.swap_flags = flags;

        self.phase = if self.quiet_count == 2 {
            Phase::Drain
        } else {
            match parity.flip() {
                Parity::Odd => Phase::SortOdd,
                Parity::Even => Phase::SortEven,
            }
        };
    }

    fn drain_cycle(&mut self) -> Option<MappingDecision> {
        self.stats.drain_cycles += 1;
        let Some(cell) = self.queue.dequeue() else {
            // pipeline flush: queue empty, return to idle
            self.record(Vec::new(), None);
            self.stats.total_cycles = self.cycle;
            self.phase = Phase::Idle;
            return None;
        };

        let addr = cell.qid as usize;
        debug_assert!(self.row_valid[addr]);
        let row = &self.exec_store[addr];
        let finish = self.handlers.finish_times(row);
        let pe = eft_select(&finish, row).expect("every task has a supported PE");
        self.handlers.commit(pe, finish[pe]);
        self.row_valid[addr] = false;

        let decision = MappingDecision {
            tid: self.tid_store[addr],
            pe,
            predicted_finish: finish[pe],
        };
        if self.stats.first_decision_cycle == 0 {
            self.stats.first_decision_cycle = self.cycle;
        }
        self.record(Vec::new(), Some(decision));
        Some(decision)
    }

    /// A whole mapping event: sync, stream every task in, then clock the
    /// scheduler until it is idle again.
    pub fn run_event(
        &mut self,
        avail: &[u64],
        tasks: &[TaskRecord],
    ) -> Result<EventOutcome, HwError> {
        if tasks.is_empty() {
            return Err(HwError::EmptyEvent);
        }
        if tasks.len() > self.config.d {
            return Err(HwError::EventTooLarge {
                n: tasks.len(),
                depth: self.config.d,
            });
        }
        self.sync_avail(avail)?;
        for rec in tasks {
            self.enqueue_task(rec)?;
        }
        let mut decisions = Vec::with_capacity(tasks.len());
        while self.phase != Phase::Idle {
            if let Some(d) = self.tick()? {
                decisions.push(d);
            }
        }
        Ok(EventOutcome {
            decisions,
            stats: self.stats,
        })
    }

    /// [`run_event`](Self::run_event) with availability given in nanoseconds.
    pub fn run_event_ns(
        &mut self,
        avail_ns: &[u64],
        tasks: &[TaskRecord],
    ) -> Result<EventOutcome, HwError> {
        let units: Vec<u64> = avail_ns
            .iter()
            .map(|&t| {
                let q = quantize_avail(t, &self.config);
                self.saturations += u64::from(q.saturated);
                q.value
            })
            .collect();
        self.run_event(&units, tasks)
    }
}

/// Writes a per-cycle trace as CSV: `cycle,phase,swaps,tid,pe,finish`. Swap
/// flags are a string of `0`/`1`, one per compared pair.
pub fn write_cycle_trace<W: Write>(mut out: W, rows: &[TraceRow]) -> io::Result<()> {
    writeln!(out, "cycle,phase,swaps,tid,pe,finish")?;
    for r in rows {
        let swaps: String = r.swaps.iter().map(|&s| if s { '1' } else { '0' }).collect();
        match r.decision {
            Some(d) => writeln!(
                out,
                "{},{},{},{},{},{}",
                r.cycle,
                r.phase.as_str(),
                swaps,
                d.tid,
                d.pe,
                d.predicted_finish
            )?,
            None => writeln!(out, "{},{},{},,,", r.cycle, r.phase.as_str(), swaps)?,
        }
    }
    Ok(())
}
