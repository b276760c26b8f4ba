//! CSV output, injection-rate sweeps, engine cross-checks and summary
//! analytics behind the command-line tool.
//!
//! CSV schemas (version 1, stable):
//!
//! * run: `instance_id,template,arrival_ns,cumulative_exec_ns,app_exec_ns`
//! * events: `event_time_ns,n,overhead_ns,scheduler`
//! * sweep: `kind,target_fps,repetition,achieved_fps,app_exec_ns,overhead_ns`,
//!   where `kind` is `rep` for one repetition and `summary` for the mean over
//!   all repetitions of a rate (empty `repetition`).
//! * cycle trace: `event,cycle,phase,swaps,tid,pe,finish`

mod analysis;
mod verify;

pub use analysis::{
    calibrate_transfer_fixed, detect_crossover, detect_saturation, hw_event_overhead, linear_fit,
    overhead_curves, AnalysisError, OverheadSeries,
};
pub use verify::{
    ascending_tasks, compare_engines, cycle_table, random_event, verify, write_cycle_table,
    CycleRow, RandomEvent, TrialOutcome, VerifyOptions, VerifyReport,
};

use std::io::Write;

use rayon::prelude::*;

use crate::hw::TraceRow;
use crate::sim::{achieved_frame_rate, simulate, MetricsReport, SimConfig, SimError};
use crate::workload::WorkloadSpec;

pub const RUN_HEADER: [&str; 5] = [
    "instance_id",
    "template",
    "arrival_ns",
    "cumulative_exec_ns",
    "app_exec_ns",
];
pub const EVENTS_HEADER: [&str; 4] = ["event_time_ns", "n", "overhead_ns", "scheduler"];
pub const SWEEP_HEADER: [&str; 6] = [
    "kind",
    "target_fps",
    "repetition",
    "achieved_fps",
    "app_exec_ns",
    "overhead_ns",
];

pub fn write_run_csv<W: Write>(out: W, report: &MetricsReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER)?;
    for i in &report.instances {
        w.write_record([
            i.instance_id.to_string(),
            i.template.clone(),
            i.arrival.as_ns().to_string(),
            i.cumulative_exec.as_ns().to_string(),
            i.app_exec.as_ns().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events_csv<W: Write>(out: W, report: &MetricsReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVENTS_HEADER)?;
    for e in &report.events {
        w.write_record([
            e.start.as_ns().to_string(),
            e.n.to_string(),
            e.overhead_ns.to_string(),
            report.scheduler.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Hardware cycle trace of a whole run, one row per cycle, tagged with the
/// index of the mapping event.
pub fn write_trace_csv<W: Write>(out: W, rows: &[(usize, TraceRow)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["event", "cycle", "phase", "swaps", "tid", "pe", "finish"])?;
    for (event, r) in rows {
        let swaps: String = r.swaps.iter().map(|&s| if s { '1' } else { '0' }).collect();
        let (tid, pe, finish) = match r.decision {
            Some(d) => (
                d.tid.to_string(),
                d.pe.to_string(),
                d.predicted_finish.to_string(),
            ),
            None => Default::default(),
        };
        w.write_record([
            event.to_string(),
            r.cycle.to_string(),
            r.phase.as_str().to_string(),
            swaps,
            tid,
            pe,
            finish,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One simulation of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub target_fps: f64,
    pub repetition: usize,
    pub achieved_fps: f64,
    pub app_exec_ns: f64,
    pub overhead_ns: f64,
}

/// Mean over the repetitions of one target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub target_fps: f64,
    pub achieved_fps_mean: f64,
    pub app_exec_ns_mean: f64,
    pub overhead_ns_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by target rate, then repetition.
    pub points: Vec<SweepPoint>,
    /// Sorted by target rate.
    pub summary: Vec<SweepSummary>,
}

impl SweepResult {
    pub fn achieved_series(&self) -> Vec<(f64, f64)> {
        self.summary
            .iter()
            .map(|s| (s.target_fps, s.achieved_fps_mean))
            .collect()
    }
}

/// Simulates `spec` at every combined target rate, `repeats` times each.
/// Repetition `r` adds `r` to `config.seed`. Simulations run in parallel;
/// results do not depend on the thread count.
pub fn sweep(
    spec: &WorkloadSpec,
    config: &SimConfig,
    rates: &[f64],
    repeats: usize,
) -> Result<SweepResult, SimError> {
    let jobs: Vec<(usize, usize)> = (0..rates.len())
        .flat_map(|i| (0..repeats).map(move |r| (i, r)))
        .collect();
    let mut points = jobs
        .par_iter()
        .map(|&(i, r)| {
            let cfg = SimConfig {
                seed: config.seed.wrapping_add(r as u64),
                ..config.clone()
            };
            let report = simulate(&spec.with_target_rate(rates[i]), &cfg)?;
            Ok((
                i,
                SweepPoint {
                    target_fps: rates[i],
                    repetition: r,
                    achieved_fps: achieved_frame_rate(&report, None)?,
                    app_exec_ns: report.mean_app_exec_ns(),
                    overhead_ns: report.mean_overhead_ns(),
                },
            ))
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    points.sort_by(|a, b| {
        a.1.target_fps
            .total_cmp(&b.1.target_fps)
            .then(a.0.cmp(&b.0))
            .then(a.1.repetition.cmp(&b.1.repetition))
    });
    let points: Vec<SweepPoint> = points.into_iter().map(|(_, p)| p).collect();

    let summary = points
        .chunk_by(|a, b| a.target_fps == b.target_fps)
        .map(|group| {
            let k = group.len() as f64;
            SweepSummary {
                target_fps: group[0].target_fps,
                achieved_fps_mean: group.iter().map(|p| p.achieved_fps).sum::<f64>() / k,
                app_exec_ns_mean: group.iter().map(|p| p.app_exec_ns).sum::<f64>() / k,
                overhead_ns_mean: group.iter().map(|p| p.overhead_ns).sum::<f64>() / k,
            }
        })
        .collect();
    Ok(SweepResult { points, summary })
}

pub fn write_sweep_csv<W: Write>(out: W, result: &SweepResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in &result.points {
        w.write_record([
            "rep".to_string(),
            fmt_f(p.target_fps),
            p.repetition.to_string(),
            fmt_f(p.achieved_fps),
            fmt_f(p.app_exec_ns),
            fmt_f(p.overhead_ns),
        ])?;
    }
    for s in &result.summary {
        w.write_record([
            "summary".to_string(),
            fmt_f(s.target_fps),
            String::new(),
            fmt_f(s.achieved_fps_mean),
            fmt_f(s.app_exec_ns_mean),
            fmt_f(s.overhead_ns_mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// The 29 injection rates used for full sweeps of the high workload:
/// log-spaced from well below to well above what the SoC can sustain.
pub fn sweep29_rates() -> Vec<f64> {
    log_spaced(SWEEP29_MIN_FPS, SWEEP29_MAX_FPS, 29)
}

pub const SWEEP29_MIN_FPS: f64 = 20.0;
pub const SWEEP29_MAX_FPS: f64 = 20_000.0;

/// `count` rates from `lo` to `hi` inclusive, equally spaced in log scale and
/// rounded to 0.01 fps.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| ((lo * (step * i as f64).exp()) * 100.0).round() / 100.0)
        .collect()
}
