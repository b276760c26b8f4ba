//! Sweeps the high workload over the 29 standard injection rates with both
//! HEFT_RT engines and reports where the achieved frame rate levels off.

use heftrt::report::{detect_saturation, sweep, sweep29_rates};
use heftrt::sim::{SchedulerKind, SimConfig};
use heftrt::workload::high_workload;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rates = sweep29_rates();
    let spec = high_workload();
    let sw = sweep(&spec, &SimConfig::new(SchedulerKind::Software), &rates, 5)?;
    let hw = sweep(&spec, &SimConfig::new(SchedulerKind::Hardware), &rates, 5)?;

    println!("target_fps,sw_fps,hw_fps,sw_app_exec_ms,hw_app_exec_ms");
    for (s, h) in sw.summary.iter().zip(&hw.summary) {
        println!(
            "{:.2},{:.1},{:.1},{:.3},{:.3}",
            s.target_fps,
            s.achieved_fps_mean,
            h.achieved_fps_mean,
            s.app_exec_ns_mean / 1e6,
            h.app_exec_ns_mean / 1e6
        );
    }
    let sw_plateau = detect_saturation(&sw.achieved_series(), 0.05, 5)?;
    let hw_plateau = detect_saturation(&hw.achieved_series(), 0.05, 5)?;
    eprintln!("plateau: sw {sw_plateau:?} fps, hw {hw_plateau:?} fps");
    Ok(())
}
