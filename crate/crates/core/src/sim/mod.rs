//! Deterministic discrete-event model of the runtime.
//!
//! Instances arrive on the workload's schedule and their source tasks enter a
//! single ready queue. Whenever the ready queue is non-empty and no mapping
//! event is running, a mapping event takes the whole queue, asks the selected
//! scheduler for decisions and lasts as long as the scheduler's overhead
//! model says. At the end of the event every task is appended to the FIFO of
//! its PE. PEs run their FIFOs back to back; a completion may release
//! successors into the ready queue. Events at the same instant are handled
//! completions first, then arrivals, then mapping-event ends, each group in
//! creation order, and a new mapping event is considered only once the
//! instant is fully processed.

mod metrics;

pub use metrics::{
    achieved_frame_rate, app_exec_time, cumulative_exec_time, scheduling_overhead_series,
    EventRecord, InstanceMetrics, MetricsReport, TaskRun,
};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hw::{
    event_compute_ns, quantize_avail, quantized_ready_task, HwConfig, HwError, HwScheduler,
    TraceRow,
};
use crate::model::{AppInstance, ModelError, TaskRecord};
use crate::sw::{
    fifo_schedule, heft_rt_schedule, sw_overhead_model, ReadyTask, SchedulerInput, SoftwareCoeffs,
};
use crate::time::SimTime;
use crate::workload::{WorkloadError, WorkloadSpec};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("workload failed validation: {0}")]
    ValidationFailure(#[from] WorkloadError),
    #[error("simulation time overflow")]
    TimeOverflow,
    #[error("instance {instance} has not completed")]
    Incomplete { instance: usize },
    #[error("no instance completed")]
    NoCompletions,
    #[error(transparent)]
    Hardware(#[from] HwError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchedulerKind {
    /// HEFT_RT in software.
    Software,
    /// The cycle-accurate hardware HEFT_RT model.
    Hardware,
    /// Earliest finish time in ready-queue order, no prioritization.
    Fifo,
}

impl SchedulerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::Software => "sw",
            SchedulerKind::Hardware => "hw",
            SchedulerKind::Fifo => "fifo",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sw" => Ok(SchedulerKind::Software),
            "hw" => Ok(SchedulerKind::Hardware),
            "fifo" => Ok(SchedulerKind::Fifo),
            other => Err(format!(
                "unknown scheduler {other:?} (expected sw, hw or fifo)"
            )),
        }
    }
}

/// Data-movement costs of one hardware mapping batch, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferCoeffs {
    pub transfer_fixed_ns: u64,
    pub transfer_per_task_ns: u64,
    pub result_fixed_ns: u64,
}

impl Default for TransferCoeffs {
    fn default() -> Self {
        TransferCoeffs {
            transfer_fixed_ns: 250_000,
            transfer_per_task_ns: 500,
            result_fixed_ns: 120_000,
        }
    }
}

impl TransferCoeffs {
    pub const ZERO: TransferCoeffs = TransferCoeffs {
        transfer_fixed_ns: 0,
        transfer_per_task_ns: 0,
        result_fixed_ns: 0,
    };

    pub fn batch_ns(&self, n: usize) -> u64 {
        self.transfer_fixed_ns + self.transfer_per_task_ns * n as u64 + self.result_fixed_ns
    }
}

/// Cost of a mapping event for each engine. The FIFO baseline is charged the
/// software model without its sorting term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OverheadModel {
    pub software: SoftwareCoeffs,
    pub transfer: TransferCoeffs,
    /// Drop the scheduler's own compute time (software cost and hardware
    /// cycles), keeping only transfer costs.
    pub zero_compute: bool,
}

impl OverheadModel {
    /// Mapping events take no time at all.
    pub fn zero() -> Self {
        OverheadModel {
            software: SoftwareCoeffs {
                fixed_ns: 0.0,
                per_task_ns: 0.0,
                per_compare_ns: 0.0,
            },
            transfer: TransferCoeffs::ZERO,
            zero_compute: true,
        }
    }

    pub fn software_ns(&self, n: usize) -> u64 {
        if self.zero_compute {
            0
        } else {
            sw_overhead_model(n, &self.software)
        }
    }

    pub fn fifo_ns(&self, n: usize) -> u64 {
        if self.zero_compute {
            0
        } else {
            let c = SoftwareCoeffs {
                per_compare_ns: 0.0,
                ..self.software
            };
            sw_overhead_model(n, &c)
        }
    }

    pub fn hardware_ns(&self, n: usize, cycles: u64, hw: &HwConfig) -> u64 {
        let compute = if self.zero_compute {
            0
        } else {
            event_compute_ns(cycles, hw)
        };
        self.transfer.batch_ns(n) + compute
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheduler: SchedulerKind,
    /// Hardware parameters; `p` is taken from the workload.
    pub hw: HwConfig,
    pub overhead: OverheadModel,
    /// Feed the software engines quantized scheduler units instead of raw
    /// nanoseconds, so they see exactly what the hardware sees.
    pub quantize_software: bool,
    /// Added to every schedule entry's arrival seed.
    pub seed: u64,
    /// Keep the hardware per-cycle trace of every mapping event.
    pub cycle_trace: bool,
}

impl SimConfig {
    pub fn new(scheduler: SchedulerKind) -> Self {
        SimConfig {
            scheduler,
            hw: HwConfig::default(),
            overhead: OverheadModel::default(),
            quantize_software: false,
            seed: 0,
            cycle_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    TaskDone { pe: usize },
    Arrival { instance: usize },
    MappingDone,
}

#[derive(Debug, Default)]
struct PeState {
    /// Projected time at which everything assigned so far has finished.
    busy_until: SimTime,
    fifo: VecDeque<u64>,
    running: Option<u64>,
}

struct EventCost {
    decisions: Vec<(u64, usize)>,
    overhead_ns: u64,
    batches: usize,
    cycles: u64,
}

struct TaskSlot {
    instance: usize,
    node: usize,
    pe: usize,
    mapped_at: SimTime,
}

struct Engine {
    config: SimConfig,
    hw_config: HwConfig,
    hw: Option<HwScheduler>,
    now: SimTime,
    queue: BinaryHeap<Reverse<(SimTime, EventKind, u64)>>,
    seq: u64,
    instances: Vec<AppInstance>,
    arrived: Vec<bool>,
    tasks: Vec<TaskSlot>,
    ready: Vec<u64>,
    pes: Vec<PeState>,
    pending: Option<Vec<(u64, usize)>>,
    events: Vec<EventRecord>,
    runs: Vec<TaskRun>,
    trace: Vec<(usize, TraceRow)>,
    saturations: u64,
}

/// Runs a workload to completion under one scheduler.
pub fn simulate(spec: &WorkloadSpec, config: &SimConfig) -> Result<MetricsReport, SimError> {
    Ok(simulate_traced(spec, config)?.0)
}

/// [`simulate`], also returning the hardware cycle trace tagged with the
/// mapping event index (empty unless `config.cycle_trace`).
pub fn simulate_traced(
    spec: &WorkloadSpec,
    config: &SimConfig,
) -> Result<(MetricsReport, Vec<(usize, TraceRow)>), SimError> {
    spec.validate()?;
    let spec = &spec.with_seed_offset(config.seed);
    let mut engine = Engine::new(spec, config)?;
    engine.run()?;
    engine.finish()
}

impl Engine {
    fn new(spec: &WorkloadSpec, config: &SimConfig) -> Result<Self, SimError> {
        let hw_config = HwConfig {
            p: spec.pe_count(),
            ..config.hw
        };
        hw_config.validate()?;
        let hw = match config.scheduler {
            SchedulerKind::Hardware => {
                let mut hw = HwScheduler::new(hw_config)?;
                if config.cycle_trace {
                    hw.enable_trace();
                }
                Some(hw)
            }
            _ => None,
        };
        let mut engine = Engine {
            config: config.clone(),
            hw_config,
            hw,
            now: SimTime::ZERO,
            queue: BinaryHeap::new(),
            seq: 0,
            instances: Vec::new(),
            arrived: Vec::new(),
            tasks: Vec::new(),
            ready: Vec::new(),
            pes: (0..spec.pe_count()).map(|_| PeState::default()).collect(),
            pending: None,
            events: Vec::new(),
            runs: Vec::new(),
            trace: Vec::new(),
            saturations: 0,
        };
        for (id, plan) in spec.planned_arrivals().into_iter().enumerate() {
            let dag = spec.templates[plan.template].dag.clone();
            engine
                .instances
                .push(AppInstance::new(id, dag, plan.at).map_err(ModelError::from)?);
            engine.arrived.push(false);
            engine.push(plan.at, EventKind::Arrival { instance: id });
        }
        Ok(engine)
    }

    fn push(&mut self, at: SimTime, kind: EventKind) {
        self.queue.push(Reverse((at, kind, self.seq)));
        self.seq += 1;
    }

    fn run(&mut self) -> Result<(), SimError> {
        while let Some(&Reverse((at, _, _))) = self.queue.peek() {
            self.now = at;
            while let Some(&Reverse((t, kind, _))) = self.queue.peek() {
                if t != at {
                    break;
                }
                self.queue.pop();
                match kind {
                    EventKind::TaskDone { pe } => self.task_done(pe)?,
                    EventKind::Arrival { instance } => self.arrive(instance)?,
                    EventKind::MappingDone => self.mapping_done()?,
                }
            }
            if self.pending.is_none() && !self.ready.is_empty() {
                self.start_mapping()?;
            }
        }
        Ok(())
    }

    fn enqueue_ready(&mut self, instance: usize, node: usize) -> Result<(), SimError> {
        self.instances[instance].mark_ready(node)?;
        let tid = self.tasks.len() as u64;
        self.tasks.push(TaskSlot {
            instance,
            node,
            pe: usize::MAX,
            mapped_at: SimTime::ZERO,
        });
        self.ready.push(tid);
        Ok(())
    }

    fn arrive(&mut self, instance: usize) -> Result<(), SimError> {
        self.arrived[instance] = true;
        for node in self.instances[instance].sources() {
            self.enqueue_ready(instance, node)?;
        }
        Ok(())
    }

    fn task_record(&self, tid: u64) -> TaskRecord {
        let slot = &self.tasks[tid as usize];
        let exec = self.instances[slot.instance].dag.nodes[slot.node]
            .exec
            .clone();
        TaskRecord::new(tid, exec).expect("workload validated")
    }

    fn start_mapping(&mut self) -> Result<(), SimError> {
        let batch = std::mem::take(&mut self.ready);
        for &tid in &batch {
            let slot = &self.tasks[tid as usize];
            self.instances[slot.instance].mark_scheduled(slot.node)?;
        }
        let avail_ns: Vec<u64> = self
            .pes
            .iter()
            .map(|p| p.busy_until.saturating_sub(self.now).as_ns())
            .collect();
        let records: Vec<TaskRecord> = batch.iter().map(|&tid| self.task_record(tid)).collect();
        let n = records.len();

        let cost = match self.config.scheduler {
            SchedulerKind::Software | SchedulerKind::Fifo => {
                let input = self.software_input(&records, &avail_ns);
                let (schedule, overhead) = if self.config.scheduler == SchedulerKind::Software {
                    (
                        heft_rt_schedule(&input),
                        self.config.overhead.software_ns(n),
                    )
                } else {
                    (fifo_schedule(&input), self.config.overhead.fifo_ns(n))
                };
                let decisions = schedule.decisions.iter().map(|d| (d.tid, d.pe)).collect();
                EventCost {
                    decisions,
                    overhead_ns: overhead,
                    batches: 1,
                    cycles: 0,
                }
            }
            SchedulerKind::Hardware => self.hardware_event(&records, &avail_ns)?,
        };
        let EventCost {
            decisions,
            overhead_ns,
            batches,
            cycles,
        } = cost;

        let end = self
            .now
            .checked_add(SimTime::from_ns(overhead_ns))
            .ok_or(SimError::TimeOverflow)?;
        self.events.push(EventRecord {
            start: self.now,
            n,
            overhead_ns,
            batches,
            cycles,
            decisions: decisions.clone(),
        });
        self.pending = Some(decisions);
        self.push(end, EventKind::MappingDone);
        Ok(())
    }

    fn software_input(&mut self, records: &[TaskRecord], avail_ns: &[u64]) -> SchedulerInput {
        if self.config.quantize_software {
            let cfg = &self.hw_config;
            let ready = records
                .iter()
                .map(|r| quantized_ready_task(r, cfg))
                .collect();
            let avail = avail_ns
                .iter()
                .map(|&t| quantize_avail(t, cfg).value)
                .collect();
            SchedulerInput::with_limit(ready, avail, cfg.accum_max()).expect("records validated")
        } else {
            let ready = records.iter().map(ReadyTask::from).collect();
            SchedulerInput::new(ready, avail_ns.to_vec()).expect("records validated")
        }
    }

    /// Feeds the ready queue through the hardware model in batches of at most
    /// `d` tasks, each batch starting from the previous batch's registers.
    fn hardware_event(
        &mut self,
        records: &[TaskRecord],
        avail_ns: &[u64],
    ) -> Result<EventCost, SimError> {
        let hw_cfg = self.hw_config;
        let model = self.config.overhead;
        let event_index = self.events.len();
        let hw = self.hw.as_mut().expect("hardware engine");
        let before = hw.saturation_events();
        let mut avail: Vec<u64> = avail_ns
            .iter()
            .map(|&t| quantize_avail(t, &hw_cfg).value)
            .collect();
        self.saturations += avail_ns
            .iter()
            .filter(|&&t| quantize_avail(t, &hw_cfg).saturated)
            .count() as u64;

        let (mut decisions, mut overhead, mut batches, mut cycles) =
            (Vec::with_capacity(records.len()), 0u64, 0, 0u64);
        for chunk in records.chunks(hw_cfg.d) {
            let out = hw.run_event(&avail, chunk)?;
            avail = hw.avail().to_vec();
            decisions.extend(out.decisions.iter().map(|d| (d.tid, d.pe)));
            overhead += model.hardware_ns(chunk.len(), out.stats.total_cycles, &hw_cfg);
            cycles += out.stats.total_cycles;
            batches += 1;
            for row in hw.take_trace() {
                self.trace.push((event_index, row));
            }
        }
        self.saturations += hw.saturation_events() - before;
        Ok(EventCost {
            decisions,
            overhead_ns: overhead,
            batches,
            cycles,
        })
    }

    fn mapping_done(&mut self) -> Result<(), SimError> {
        let decisions = self.pending.take().expect("mapping event in progress");
        for (tid, pe) in decisions {
            let exec = {
                let slot = &mut self.tasks[tid as usize];
                slot.pe = pe;
                slot.mapped_at = self.now;
                self.instances[slot.instance].dag.nodes[slot.node].exec[pe]
                    .expect("scheduler picked a supported PE")
            };
            let state = &mut self.pes[pe];
            state.busy_until = state
                .busy_until
                .max(self.now)
                .checked_add(SimTime::from_ns(exec))
                .ok_or(SimError::TimeOverflow)?;
            state.fifo.push_back(tid);
        }
        for pe in 0..self.pes.len() {
            self.start_next(pe)?;
        }
        Ok(())
    }

    fn start_next(&mut self, pe: usize) -> Result<(), SimError> {
        if self.pes[pe].running.is_some() {
            return Ok(());
        }
        let Some(tid) = self.pes[pe].fifo.pop_front() else {
            return Ok(());
        };
        let slot = &self.tasks[tid as usize];
        let exec = self.instances[slot.instance].dag.nodes[slot.node].exec[pe].expect("supported");
        let (instance, node) = (slot.instance, slot.node);
        self.instances[instance].mark_running(node, self.now)?;
        let end = self
            .now
            .checked_add(SimTime::from_ns(exec))
            .ok_or(SimError::TimeOverflow)?;
        self.pes[pe].running = Some(tid);
        self.push(end, EventKind::TaskDone { pe });
        Ok(())
    }

    fn task_done(&mut self, pe: usize) -> Result<(), SimError> {
        let tid = self.pes[pe].running.take().expect("PE was running a task");
        let slot = &self.tasks[tid as usize];
        let (instance, node, mapped_at) = (slot.instance, slot.node, slot.mapped_at);
        let start = self.instances[instance]
            .start_time(node)
            .expect("running task has a start");
        self.runs.push(TaskRun {
            tid,
            instance,
            node,
            pe,
            mapped_at,
            start,
            finish: self.now,
        });
        for succ in self.instances[instance].mark_done(node, self.now)? {
            self.enqueue_ready(instance, succ)?;
        }
        self.start_next(pe)
    }

    fn finish(self) -> Result<(MetricsReport, Vec<(usize, TraceRow)>), SimError> {
        let mut instances = Vec::with_capacity(self.instances.len());
        for inst in &self.instances {
            let completion = (0..inst.node_count())
                .filter_map(|v| inst.finish_time(v))
                .max()
                .ok_or(SimError::Incomplete {
                    instance: inst.instance_id,
                })?;
            instances.push(InstanceMetrics {
                instance_id: inst.instance_id,
                template: inst.dag.template_name.clone(),
                arrival: inst.arrival,
                completion,
                cumulative_exec: cumulative_exec_time(inst)?,
                app_exec: app_exec_time(inst)?,
            });
        }
        let mut tasks = self.runs;
        tasks.sort_by_key(|r| (r.start, r.pe));
        let report = MetricsReport {
            scheduler: self.config.scheduler,
            instances,
            events: self.events,
            tasks,
            saturation_events: self.saturations,
        };
        Ok((report, self.trace))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{AppDag, NodeTemplate, PeDescriptor};
    use crate::workload::{AppTemplate, ArrivalProcess, ScheduleEntry};

    fn one_pe_spec(exec_ms: &[u64]) -> WorkloadSpec {
        let nodes = exec_ms
            .iter()
            .enumerate()
            .map(|(i, &ms)| NodeTemplate::new(format!("t{i}"), "cpu", vec![Some(ms * 1_000_000)]))
            .collect();
        let edges = (1..exec_ms.len()).map(|i| (i - 1, i)).collect();
        WorkloadSpec {
            name: "t".into(),
            pes: vec![PeDescriptor::new(0, "cpu")],
            templates: vec![AppTemplate {
                dag: Arc::new(AppDag {
                    template_name: "chain".into(),
                    nodes,
                    edges,
                }),
                frame_size_kb: 1,
            }],
            schedule: vec![ScheduleEntry {
                template: "chain".into(),
                count: 1,
                rate_fps: 1.0,
                arrival: ArrivalProcess::Periodic,
                seed: 0,
            }],
        }
    }

    fn zero_overhead(kind: SchedulerKind) -> SimConfig {
        SimConfig {
            overhead: OverheadModel::zero(),
            ..SimConfig::new(kind)
        }
    }

    #[test]
    fn single_task() {
        let r = simulate(&one_pe_spec(&[5]), &zero_overhead(SchedulerKind::Software)).unwrap();
        assert_eq!(r.instances[0].app_exec, SimTime::from_ms(5));
    }

    #[test]
    fn serial_chain() {
        for kind in [
            SchedulerKind::Software,
            SchedulerKind::Hardware,
            SchedulerKind::Fifo,
        ] {
            let r = simulate(&one_pe_spec(&[5, 7]), &zero_overhead(kind)).unwrap();
            assert_eq!(r.instances[0].app_exec, SimTime::from_ms(12), "{kind}");
            assert_eq!(
                r.instances[0].cumulative_exec,
                SimTime::from_ms(12),
                "{kind}"
            );
            assert_eq!(r.events.len(), 2);
        }
    }

    #[test]
    fn chain_with_event_overhead() {
        let mut cfg = zero_overhead(SchedulerKind::Software);
        cfg.overhead.zero_compute = false;
        cfg.overhead.software.fixed_ns = 1_000_000.0;
        let r = simulate(&one_pe_spec(&[5, 7]), &cfg).unwrap();
        assert_eq!(r.instances[0].app_exec, SimTime::from_ms(14));
        assert_eq!(r.instances[0].cumulative_exec, SimTime::from_ms(12));
        assert_eq!(
            scheduling_overhead_series(&r),
            vec![(1, 1_000_000), (1, 1_000_000)]
        );
    }

    #[test]
    fn hardware_overhead_counts_cycles_and_transfer() {
        let mut cfg = SimConfig::new(SchedulerKind::Hardware);
        cfg.overhead.transfer = TransferCoeffs {
            transfer_fixed_ns: 100,
            transfer_per_task_ns: 10,
            result_fixed_ns: 7,
        };
        let r = simulate(&one_pe_spec(&[1]), &cfg).unwrap();
        // one task: 5 cycles of 3.048 ns -> 15 ns
        assert_eq!(r.events[0].cycles, 5);
        assert_eq!(r.events[0].overhead_ns, 100 + 10 + 7 + 15);
    }

    #[test]
    fn scheduler_names_parse() {
        assert_eq!("hw".parse::<SchedulerKind>(), Ok(SchedulerKind::Hardware));
        assert!("edf".parse::<SchedulerKind>().is_err());
    }
}
