//! Runs the built-in low and high workloads under all three schedulers and
//! prints the headline metrics.

use heftrt::sim::{achieved_frame_rate, simulate, SchedulerKind, SimConfig};
use heftrt::workload::{high_workload, low_workload};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("workload,scheduler,fps,mean_app_exec_ms,mean_cumulative_ms,events,mean_overhead_us");
    for spec in [low_workload(), high_workload()] {
        for kind in [
            SchedulerKind::Software,
            SchedulerKind::Hardware,
            SchedulerKind::Fifo,
        ] {
            let r = simulate(&spec, &SimConfig::new(kind))?;
            println!(
                "{},{},{:.1},{:.3},{:.3},{},{:.1}",
                spec.name,
                kind,
                achieved_frame_rate(&r, None)?,
                r.mean_app_exec_ns() / 1e6,
                r.mean_cumulative_exec_ns() / 1e6,
                r.events.len(),
                r.mean_overhead_ns() / 1e3
            );
        }
    }
    Ok(())
}
