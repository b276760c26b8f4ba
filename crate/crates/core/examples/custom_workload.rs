//! Parses a small workload written inline, runs it, and prints the per-event
//! overhead CSV.

use heftrt::report::write_events_csv;
use heftrt::sim::{scheduling_overhead_series, simulate, SchedulerKind, SimConfig};
use heftrt::workload::parse_spec;

const SPEC: &str = r#"
schema_version = 1
name = "diamond"

[[pe]]
id = 0
name = "cpu"

[[pe]]
id = 1
name = "dsp"

[[template]]
name = "diamond"
frame_size_kb = 64
edges = [[0, 1], [0, 2], [1, 3], [2, 3]]

[[template.node]]
id = 0
name = "load"
kind = "cpu"
exec_ns = { cpu = 20000, dsp = "unsupported" }

[[template.node]]
id = 1
name = "filter_a"
kind = "dsp"
exec_ns = { cpu = 90000, dsp = 15000 }

[[template.node]]
id = 2
name = "filter_b"
kind = "dsp"
exec_ns = { cpu = 90000, dsp = 15000 }

[[template.node]]
id = 3
name = "store"
kind = "cpu"
exec_ns = { cpu = 10000, dsp = "unsupported" }

[[schedule]]
template = "diamond"
count = 5
rate_fps = 2000.0
arrival = "periodic"
seed = 7
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_spec(SPEC)?;
    let report = simulate(&spec, &SimConfig::new(SchedulerKind::Hardware))?;
    write_events_csv(std::io::stdout().lock(), &report)?;
    let total: u64 = scheduling_overhead_series(&report)
        .iter()
        .map(|e| e.1)
        .sum();
    eprintln!("{} events, {total} ns of scheduling", report.events.len());
    Ok(())
}
