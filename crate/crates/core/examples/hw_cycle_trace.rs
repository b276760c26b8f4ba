//! Drives the cycle-accurate hardware scheduler through one mapping event
//! and prints its per-cycle trace and cycle statistics.

use std::io;

use heftrt::hw::{
    worst_case_cycles, worst_case_first_decision, write_cycle_trace, HwConfig, HwScheduler,
};
use heftrt::model::TaskRecord;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = HwConfig {
        p: 2,
        time_unit_ns: 1,
        ..HwConfig::default()
    };
    let mut hw = HwScheduler::new(config)?;
    hw.enable_trace();

    let tasks = vec![
        TaskRecord::new(0, vec![Some(10), Some(12)])?,
        TaskRecord::new(1, vec![Some(25), Some(15)])?,
        TaskRecord::new(2, vec![Some(40), None])?,
        TaskRecord::new(3, vec![Some(8), Some(6)])?,
    ];
    let out = hw.run_event(&[0, 0], &tasks)?;
    write_cycle_trace(io::stdout().lock(), &hw.take_trace())?;

    let s = out.stats;
    let n = tasks.len();
    eprintln!(
        "{} tasks: fill {} + sort {} + drain {} = {} cycles (bound {}), first decision at {} (bound {})",
        n,
        s.fill_cycles,
        s.sort_cycles,
        s.drain_cycles,
        s.total_cycles,
        worst_case_cycles(n),
        s.first_decision_cycle,
        worst_case_first_decision(n)
    );
    Ok(())
}
