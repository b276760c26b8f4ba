//! Per-run measurements and the derived metrics reported by the tools.

use super::{SchedulerKind, SimError};
use crate::model::AppInstance;
use crate::time::SimTime;

/// Sum of the task execution times of a finished instance, ignoring any
/// scheduling overhead or queueing.
pub fn cumulative_exec_time(inst: &AppInstance) -> Result<SimTime, SimError> {
    if !inst.is_complete() {
        return Err(SimError::Incomplete {
            instance: inst.instance_id,
        });
    }
    Ok((0..inst.node_count()).fold(SimTime::ZERO, |acc, v| {
        acc + (inst.finish_time(v).expect("complete") - inst.start_time(v).expect("complete"))
    }))
}

/// Time from the instance's arrival at the runtime to the end of its last
/// task, so the overhead of every mapping event it went through is included.
pub fn app_exec_time(inst: &AppInstance) -> Result<SimTime, SimError> {
    if !inst.is_complete() {
        return Err(SimError::Incomplete {
            instance: inst.instance_id,
        });
    }
    let last = (0..inst.node_count())
        .filter_map(|v| inst.finish_time(v))
        .max()
        .expect("instance has nodes");
    Ok(last - inst.arrival)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMetrics {
    pub instance_id: usize,
    pub template: String,
    pub arrival: SimTime,
    pub completion: SimTime,
    pub cumulative_exec: SimTime,
    pub app_exec: SimTime,
}

/// One mapping event as the runtime saw it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub start: SimTime,
    pub n: usize,
    pub overhead_ns: u64,
    /// Hardware batches (1 for the software engines).
    pub batches: usize,
    /// Scheduler clock cycles, hardware engine only.
    pub cycles: u64,
    /// `(tid, pe)` in decision order.
    pub decisions: Vec<(u64, usize)>,
}

/// Execution of one task on one PE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskRun {
    pub tid: u64,
    pub instance: usize,
    pub node: usize,
    pub pe: usize,
    /// End of the mapping event that placed the task.
    pub mapped_at: SimTime,
    pub start: SimTime,
    pub finish: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scheduler: SchedulerKind,
    /// Ordered by instance id.
    pub instances: Vec<InstanceMetrics>,
    pub events: Vec<EventRecord>,
    /// Ordered by start time, then PE.
    pub tasks: Vec<TaskRun>,
    pub saturation_events: u64,
}

impl MetricsReport {
    pub fn mean_app_exec_ns(&self) -> f64 {
        mean(self.instances.iter().map(|i| i.app_exec.as_ns() as f64))
    }

    pub fn mean_cumulative_exec_ns(&self) -> f64 {
        mean(
            self.instances
                .iter()
                .map(|i| i.cumulative_exec.as_ns() as f64),
        )
    }

    pub fn mean_overhead_ns(&self) -> f64 {
        mean(self.events.iter().map(|e| e.overhead_ns as f64))
    }

    pub fn total_overhead_ns(&self) -> u64 {
        self.events.iter().map(|e| e.overhead_ns).sum()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Completed instances per second between the first arrival and the last
/// completion. With a window, only instances that both arrive and complete
/// inside it count, and the window length is the denominator.
pub fn achieved_frame_rate(
    report: &MetricsReport,
    window: Option<(SimTime, SimTime)>,
) -> Result<f64, SimError> {
    let (count, span) = match window {
        None => {
            let first = report.instances.iter().map(|i| i.arrival).min();
            let last = report.instances.iter().map(|i| i.completion).max();
            match (first, last) {
                (Some(f), Some(l)) => (report.instances.len(), l - f),
                _ => return Err(SimError::NoCompletions),
            }
        }
        Some((from, to)) => {
            let count = report
                .instances
                .iter()
                .filter(|i| i.arrival >= from && i.completion <= to)
                .count();
            (count, to.saturating_sub(from))
        }
    };
    if count == 0 || span == SimTime::ZERO {
        return Err(SimError::NoCompletions);
    }
    Ok(count as f64 / span.as_secs_f64())
}

/// `(ready queue size, overhead)` for every mapping event, in event order.
pub fn scheduling_overhead_series(report: &MetricsReport) -> Vec<(usize, u64)> {
    report.events.iter().map(|e| (e.n, e.overhead_ns)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(instances: &[(u64, u64)]) -> MetricsReport {
        MetricsReport {
            scheduler: SchedulerKind::Software,
            instances: instances
                .iter()
                .enumerate()
                .map(|(i, &(a, c))| InstanceMetrics {
                    instance_id: i,
                    template: "t".into(),
                    arrival: SimTime::from_ns(a),
                    completion: SimTime::from_ns(c),
                    cumulative_exec: SimTime::ZERO,
                    app_exec: SimTime::from_ns(c - a),
                })
                .collect(),
            events: vec![],
            tasks: vec![],
            saturation_events: 0,
        }
    }

    #[test]
    fn frame_rate_examples() {
        let ten: Vec<(u64, u64)> = (0..10)
            .map(|i| (i * 10_000_000, i * 10_000_000 + 10_000_000))
            .collect();
        let r = achieved_frame_rate(&report(&ten), None).unwrap();
        assert!((r - 100.0).abs() < 1e-9);
        let one = achieved_frame_rate(&report(&[(0, 500_000_000)]), None).unwrap();
        assert!((one - 2.0).abs() < 1e-12);
        assert!(matches!(
            achieved_frame_rate(&report(&[]), None),
            Err(SimError::NoCompletions)
        ));
    }

    #[test]
    fn windowed_frame_rate() {
        let r = report(&[(0, 10), (5, 20), (30, 2_000_000_000)]);
        let fps = achieved_frame_rate(&r, Some((SimTime::ZERO, SimTime::from_ms(1000)))).unwrap();
        assert!((fps - 2.0).abs() < 1e-12);
    }
}
