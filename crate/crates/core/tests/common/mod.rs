#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use heftrt::model::{AppDag, NodeTemplate, PeDescriptor};
use heftrt::sim::MetricsReport;
use heftrt::workload::{AppTemplate, ArrivalProcess, ScheduleEntry, WorkloadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random but valid workload: 1-5 PEs, 1-3 templates of 1-10 nodes.
pub fn random_workload(seed: u64) -> WorkloadSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.random_range(1..=5usize);
    let pes = (0..p)
        .map(|i| PeDescriptor::new(i, format!("pe{i}")))
        .collect();
    let n_templates = rng.random_range(1..=3usize);
    let mut templates = Vec::new();
    let mut schedule = Vec::new();
    for t in 0..n_templates {
        let n = rng.random_range(1..=10usize);
        let nodes = (0..n)
            .map(|i| {
                let mut exec: Vec<Option<u64>> = (0..p)
                    .map(|_| {
                        (!rng.random_ratio(1, 5)).then(|| rng.random_range(1..=500u64) * 1_000)
                    })
                    .collect();
                if exec.iter().all(Option::is_none) {
                    exec[rng.random_range(0..p)] = Some(rng.random_range(1..=500u64) * 1_000);
                }
                NodeTemplate::new(format!("n{i}"), "k", exec)
            })
            .collect();
        let mut edges = Vec::new();
        for j in 1..n {
            for i in 0..j {
                if rng.random_ratio(3, 10) {
                    edges.push((i, j));
                }
            }
        }
        let name = format!("T{t}");
        templates.push(AppTemplate {
            dag: Arc::new(AppDag {
                template_name: name.clone(),
                nodes,
                edges,
            }),
            frame_size_kb: 1,
        });
        schedule.push(ScheduleEntry {
            template: name,
            count: rng.random_range(1..=6),
            rate_fps: rng.random_range(100.0..5_000.0),
            arrival: if rng.random_bool(0.5) {
                ArrivalProcess::Periodic
            } else {
                ArrivalProcess::Poisson
            },
            seed: rng.random(),
        });
    }
    WorkloadSpec {
        name: format!("random{seed}"),
        pes,
        templates,
        schedule,
    }
}

/// Causality, PE exclusivity, conservation and metric consistency.
pub fn check_invariants(spec: &WorkloadSpec, report: &MetricsReport) -> Result<(), String> {
    let plan = spec.planned_arrivals();
    if report.instances.len() != plan.len() {
        return Err(format!(
            "{} instances reported, {} planned",
            report.instances.len(),
            plan.len()
        ));
    }
    let mut runs: HashMap<(usize, usize), Vec<_>> = HashMap::new();
    for r in &report.tasks {
        runs.entry((r.instance, r.node)).or_default().push(*r);
    }
    for (id, (inst, p)) in report.instances.iter().zip(&plan).enumerate() {
        let dag = &spec.templates[p.template].dag;
        if inst.instance_id != id || inst.arrival != p.at {
            return Err(format!("instance {id} does not match its planned arrival"));
        }
        let mut cumulative = 0;
        let mut last = inst.arrival;
        for v in 0..dag.nodes.len() {
            let rs = runs.get(&(id, v)).map(Vec::as_slice).unwrap_or(&[]);
            if rs.len() != 1 {
                return Err(format!("instance {id} node {v} ran {} times", rs.len()));
            }
            let r = rs[0];
            let exec = dag.nodes[v].exec[r.pe]
                .ok_or(format!("instance {id} node {v} on unsupported PE"))?;
            if r.finish.as_ns() - r.start.as_ns() != exec {
                return Err(format!("instance {id} node {v} ran for the wrong time"));
            }
            if r.start < r.mapped_at || r.start < inst.arrival {
                return Err(format!(
                    "instance {id} node {v} started before it was mapped"
                ));
            }
            for &(a, b) in &dag.edges {
                if b == v {
                    let pred = runs
                        .get(&(id, a))
                        .and_then(|rs| rs.first())
                        .ok_or(format!("instance {id} node {a} never ran"))?;
                    if r.start < pred.finish {
                        return Err(format!(
                            "instance {id} node {v} started before predecessor {a} finished"
                        ));
                    }
                }
            }
            cumulative += exec;
            last = last.max(r.finish);
        }
        if inst.cumulative_exec.as_ns() != cumulative {
            return Err(format!("instance {id} cumulative time mismatch"));
        }
        if inst.app_exec != last - inst.arrival || inst.completion != last {
            return Err(format!("instance {id} application time mismatch"));
        }
    }
    if runs.len() != report.tasks.len() {
        return Err("duplicate task runs".into());
    }
    for pe in 0..spec.pe_count() {
        let mut on_pe: Vec<_> = report.tasks.iter().filter(|r| r.pe == pe).collect();
        on_pe.sort_by_key(|r| r.start);
        for w in on_pe.windows(2) {
            if w[1].start < w[0].finish {
                return Err(format!("PE {pe} runs two tasks at once"));
            }
            if w[1].mapped_at < w[0].mapped_at {
                return Err(format!("PE {pe} ran tasks out of assignment order"));
            }
        }
    }
    Ok(())
}
