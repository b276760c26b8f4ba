//! Workload description: PEs, application templates, and the arrival
//! schedule of application instances.
//!
//! Workloads are stored as versioned TOML files (see [`load_spec`] and
//! [`save_spec`]); `fixtures/low.toml` and `fixtures/high.toml` hold the two
//! built-in workloads.

mod arrivals;
mod format;
mod templates;

pub use arrivals::generate_arrivals;
pub use format::{load_spec, parse_spec, save_spec, to_toml, SCHEMA_VERSION};
pub use templates::{
    builtin_pes, builtin_templates, high_workload, low_workload, FRAME_KB_HIGH, FRAME_KB_LOW,
};

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{validate_dag, AppDag, PeDescriptor};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid workload ({context}): {reason}")]
    Validation { context: String, reason: String },
}

impl WorkloadError {
    fn invalid(context: impl Into<String>, reason: impl Into<String>) -> Self {
        WorkloadError::Validation {
            context: context.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalProcess {
    Periodic,
    Poisson,
}

impl ArrivalProcess {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrivalProcess::Periodic => "periodic",
            ArrivalProcess::Poisson => "poisson",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppTemplate {
    pub dag: Arc<AppDag>,
    /// Input payload per instance; informational.
    pub frame_size_kb: u32,
}

impl AppTemplate {
    pub fn name(&self) -> &str {
        &self.dag.template_name
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub template: String,
    pub count: usize,
    pub rate_fps: f64,
    pub arrival: ArrivalProcess,
    pub seed: u64,
}

/// One instance to inject: which template and when.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedArrival {
    pub template: usize,
    pub at: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub name: String,
    pub pes: Vec<PeDescriptor>,
    pub templates: Vec<AppTemplate>,
    pub schedule: Vec<ScheduleEntry>,
}

impl WorkloadSpec {
    pub fn pe_count(&self) -> usize {
        self.pes.len()
    }

    pub fn template_index(&self, name: &str) -> Option<usize> {
        self.templates.iter().position(|t| t.name() == name)
    }

    pub fn total_instances(&self) -> usize {
        self.schedule.iter().map(|e| e.count).sum()
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        if self.pes.is_empty() {
            return Err(WorkloadError::invalid("pe", "at least one PE is required"));
        }
        let mut names = HashSet::new();
        for (i, pe) in self.pes.iter().enumerate() {
            if pe.id != i {
                return Err(WorkloadError::invalid(
                    format!("pe {}", pe.name),
                    format!(
                        "PE ids must be dense and ordered; expected {i}, found {}",
                        pe.id
                    ),
                ));
            }
            if !names.insert(pe.name.as_str()) {
                return Err(WorkloadError::invalid(
                    format!("pe {}", pe.name),
                    "duplicate PE name",
                ));
            }
        }

        let mut seen = HashSet::new();
        for t in &self.templates {
            let ctx = format!("template {}", t.name());
            if !seen.insert(t.name()) {
                return Err(WorkloadError::invalid(ctx, "duplicate template name"));
            }
            validate_dag(&t.dag).map_err(|e| WorkloadError::invalid(&ctx, e.to_string()))?;
            for (id, node) in t.dag.nodes.iter().enumerate() {
                if node.exec.len() != self.pes.len() {
                    return Err(WorkloadError::invalid(
                        &ctx,
                        format!(
                            "node {id} has {} exec times for {} PEs",
                            node.exec.len(),
                            self.pes.len()
                        ),
                    ));
                }
                if node.exec.iter().all(Option::is_none) {
                    return Err(WorkloadError::invalid(
                        &ctx,
                        format!("node {id} has no supported PE"),
                    ));
                }
                if node.exec.contains(&Some(0)) {
                    return Err(WorkloadError::invalid(
                        &ctx,
                        format!("node {id} has a zero exec time"),
                    ));
                }
            }
        }

        for e in &self.schedule {
            let ctx = format!("schedule {}", e.template);
            if self.template_index(&e.template).is_none() {
                return Err(WorkloadError::invalid(ctx, "unknown template"));
            }
            if e.count == 0 {
                return Err(WorkloadError::invalid(ctx, "count must be at least 1"));
            }
            if !(e.rate_fps.is_finite() && e.rate_fps > 0.0) {
                return Err(WorkloadError::invalid(ctx, "rate must be positive"));
            }
        }
        Ok(())
    }

    /// Every instance of every schedule entry, ordered by arrival time, then
    /// by schedule entry, then by position within the entry.
    pub fn planned_arrivals(&self) -> Vec<PlannedArrival> {
        let mut all: Vec<(SimTime, usize, usize, usize)> =
            Vec::with_capacity(self.total_instances());
        for (ei, e) in self.schedule.iter().enumerate() {
            let template = self.template_index(&e.template).expect("validated");
            for (k, at) in generate_arrivals(e).into_iter().enumerate() {
                all.push((at, ei, k, template));
            }
        }
        all.sort_by_key(|&(at, ei, k, _)| (at, ei, k));
        all.into_iter()
            .map(|(at, _, _, template)| PlannedArrival { template, at })
            .collect()
    }

    /// Rescales every entry so the combined instance arrival rate is
    /// `target_fps`, split in proportion to the entry counts.
    pub fn with_target_rate(&self, target_fps: f64) -> WorkloadSpec {
        let total = self.total_instances() as f64;
        let mut spec = self.clone();
        for e in &mut spec.schedule {
            e.rate_fps = target_fps * e.count as f64 / total;
        }
        spec
    }

    /// Shifts every entry seed, for independent repetitions.
    pub fn with_seed_offset(&self, offset: u64) -> WorkloadSpec {
        let mut spec = self.clone();
        for e in &mut spec.schedule {
            e.seed = e.seed.wrapping_add(offset);
        }
        spec
    }
}
