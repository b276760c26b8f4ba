//! Built-in application templates and the `low` / `high` workloads.
//!
//! The four DAGs mimic a radar correlator (RC), temporal interference
//! mitigation (TM), pulse Doppler (PD) and a WiFi transmitter (TX) on an SoC
//! with three identical CPU cores and one FFT accelerator. Node counts,
//! shapes and times are representative fixtures, not measurements: RC and TM
//! are short (low latency), PD and TX an order of magnitude longer, and every
//! FFT-class node runs about 10-15x faster on the accelerator, which cannot
//! run anything else.

use std::sync::Arc;

use super::{AppTemplate, ArrivalProcess, ScheduleEntry, WorkloadSpec};
use crate::model::{AppDag, ExecTime, NodeTemplate, PeDescriptor};

pub const FRAME_KB_LOW: u32 = 1280;
pub const FRAME_KB_HIGH: u32 = 1037;

const US: u64 = 1_000;

pub fn builtin_pes() -> Vec<PeDescriptor> {
    ["A53-0", "A53-1", "A53-2", "FFT"]
        .into_iter()
        .enumerate()
        .map(|(i, name)| PeDescriptor::new(i, name))
        .collect()
}

fn cpu(name: &str, us: u64) -> NodeTemplate {
    let t = Some(us * US);
    NodeTemplate::new(name, "cpu", vec![t, t, t, None])
}

fn fft(name: &str, cpu_us: u64, acc_us: u64) -> NodeTemplate {
    let t: ExecTime = Some(cpu_us * US);
    NodeTemplate::new(name, "fft", vec![t, t, t, Some(acc_us * US)])
}

fn radar_correlator() -> AppDag {
    AppDag {
        template_name: "RC".into(),
        nodes: vec![
            cpu("lfm_gen", 30),
            fft("fft_rx", 120, 12),
            fft("fft_ref", 120, 12),
            cpu("conj_mult", 25),
            fft("ifft", 120, 12),
            cpu("peak_detect", 20),
        ],
        edges: vec![(0, 2), (1, 3), (2, 3), (3, 4), (4, 5)],
    }
}

fn temporal_mitigation() -> AppDag {
    AppDag {
        template_name: "TM".into(),
        nodes: vec![
            cpu("frame_split", 20),
            fft("fft_a", 100, 10),
            fft("fft_b", 100, 10),
            cpu("mask_a", 40),
            cpu("mask_b", 40),
            fft("ifft_a", 100, 10),
            fft("ifft_b", 100, 10),
            cpu("merge", 25),
        ],
        edges: vec![
            (0, 1),
            (0, 2),
            (1, 3),
            (2, 4),
            (3, 5),
            (4, 6),
            (5, 7),
            (6, 7),
        ],
    }
}

fn pulse_doppler() -> AppDag {
    let mut nodes = vec![cpu("pulse_gen", 150)];
    let mut edges = Vec::new();
    for lane in 0..4 {
        nodes.push(fft(&format!("fft_{lane}"), 600, 40));
    }
    for lane in 0..4 {
        nodes.push(cpu(&format!("matched_mult_{lane}"), 250));
    }
    for lane in 0..4 {
        nodes.push(fft(&format!("ifft_{lane}"), 600, 40));
    }
    nodes.push(cpu("doppler_reduce", 400));
    for lane in 0..4 {
        edges.push((0, 1 + lane));
        edges.push((1 + lane, 5 + lane));
        edges.push((5 + lane, 9 + lane));
        edges.push((9 + lane, 13));
    }
    AppDag {
        template_name: "PD".into(),
        nodes,
        edges,
    }
}

fn wifi_tx() -> AppDag {
    let mut nodes = vec![
        cpu("scrambler", 200),
        cpu("encoder", 350),
        cpu("interleaver", 250),
        cpu("qpsk_mod", 300),
        cpu("pilot_insert", 150),
    ];
    for sym in 0..4 {
        nodes.push(fft(&format!("ifft_{sym}"), 500, 35));
    }
    nodes.extend([
        cpu("crc", 120),
        cpu("cyclic_prefix", 200),
        cpu("frame_out", 100),
    ]);
    let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 9), (9, 11), (10, 11)];
    for sym in 0..4 {
        edges.push((4, 5 + sym));
        edges.push((5 + sym, 10));
    }
    AppDag {
        template_name: "TX".into(),
        nodes,
        edges,
    }
}

/// RC, TM, PD and TX, in that order.
pub fn builtin_templates() -> [AppDag; 4] {
    [
        radar_correlator(),
        temporal_mitigation(),
        pulse_doppler(),
        wifi_tx(),
    ]
}

fn workload(name: &str, apps: [(AppDag, u32); 2], count: usize, rate_fps: f64) -> WorkloadSpec {
    let schedule = apps
        .iter()
        .enumerate()
        .map(|(i, (dag, _))| ScheduleEntry {
            template: dag.template_name.clone(),
            count,
            rate_fps,
            arrival: ArrivalProcess::Poisson,
            seed: i as u64 + 1,
        })
        .collect();
    WorkloadSpec {
        name: name.into(),
        pes: builtin_pes(),
        templates: apps
            .into_iter()
            .map(|(dag, frame_size_kb)| AppTemplate {
                dag: Arc::new(dag),
                frame_size_kb,
            })
            .collect(),
        schedule,
    }
}

/// Twenty RC and twenty TM frames.
pub fn low_workload() -> WorkloadSpec {
    workload(
        "low",
        [
            (radar_correlator(), FRAME_KB_LOW),
            (temporal_mitigation(), FRAME_KB_LOW),
        ],
        20,
        100.0,
    )
}

/// Ten PD and ten TX frames.
pub fn high_workload() -> WorkloadSpec {
    workload(
        "high",
        [(pulse_doppler(), FRAME_KB_HIGH), (wifi_tx(), FRAME_KB_HIGH)],
        10,
        100.0,
    )
}
