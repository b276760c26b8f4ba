//! TOML workload files.
//!
//! ```toml
//! schema_version = 1
//! name = "high"
//!
//! [[pe]]
//! id = 0
//! name = "A53-0"
//!
//! [[template]]
//! name = "PD"
//! frame_size_kb = 1037
//! edges = [[0, 1], [1, 2]]
//!
//! [[template.node]]
//! id = 0
//! name = "pulse_gen"
//! kind = "cpu"
//! exec_ns = { "A53-0" = 150000, FFT = "unsupported" }
//!
//! [[schedule]]
//! template = "PD"
//! count = 10
//! rate_fps = 100.0
//! arrival = "periodic"   # or "poisson"
//! seed = 1
//! ```
//!
//! All times are integer nanoseconds. Every node lists every declared PE
//! exactly once, either with a time or with the string `"unsupported"`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AppTemplate, ArrivalProcess, ScheduleEntry, WorkloadError, WorkloadSpec};
use crate::model::{AppDag, ExecTime, NodeTemplate, PeDescriptor};

pub const SCHEMA_VERSION: u32 = 1;

const UNSUPPORTED: &str = "unsupported";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema_version: u32,
    name: String,
    #[serde(rename = "pe")]
    pes: Vec<RawPe>,
    #[serde(rename = "template")]
    templates: Vec<RawTemplate>,
    schedule: Vec<RawEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPe {
    id: usize,
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    name: String,
    frame_size_kb: u32,
    edges: Vec<[usize; 2]>,
    #[serde(rename = "node")]
    nodes: Vec<RawNode>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: usize,
    name: String,
    kind: String,
    exec_ns: ExecMap,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    template: String,
    count: usize,
    rate_fps: f64,
    arrival: RawArrival,
    seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawArrival {
    Periodic,
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum ExecValue {
    Ns(u64),
    Word(String),
}

/// PE name → exec value, keeping file order.
#[derive(Debug, Default)]
struct ExecMap(Vec<(String, ExecValue)>);

impl Serialize for ExecMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ExecMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExecMapVisitor;

        impl<'de> Visitor<'de> for ExecMapVisitor {
            type Value = ExecMap;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a table of PE name to nanoseconds or \"unsupported\"")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<ExecMap, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, ExecValue>()? {
                    out.push((k, v));
                }
                Ok(ExecMap(out))
            }
        }

        deserializer.deserialize_map(ExecMapVisitor)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, column)
}

/// Parses and validates a workload from TOML text.
pub fn parse_spec(text: &str) -> Result<WorkloadSpec, WorkloadError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        WorkloadError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let spec = from_raw(raw)?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<WorkloadSpec, WorkloadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| WorkloadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

pub fn to_toml(spec: &WorkloadSpec) -> String {
    toml::to_string(&to_raw(spec)).expect("workload spec serializes to TOML")
}

pub fn save_spec(spec: &WorkloadSpec, path: impl AsRef<Path>) -> Result<(), WorkloadError> {
    let path = path.as_ref();
    std::fs::write(path, to_toml(spec)).map_err(|source| WorkloadError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn from_raw(raw: RawSpec) -> Result<WorkloadSpec, WorkloadError> {
    if raw.schema_version != SCHEMA_VERSION {
        return Err(WorkloadError::invalid(
            "schema_version",
            format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                raw.schema_version
            ),
        ));
    }
    let pes: Vec<PeDescriptor> = raw
        .pes
        .into_iter()
        .map(|p| PeDescriptor::new(p.id, p.name))
        .collect();
    let pe_index: HashMap<&str, usize> = pes.iter().map(|p| (p.name.as_str(), p.id)).collect();

    let mut templates = Vec::with_capacity(raw.templates.len());
    for t in raw.templates {
        let ctx = format!("template {}", t.name);
        let mut nodes = t.nodes;
        nodes.sort_by_key(|n| n.id);
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(WorkloadError::invalid(
                    &ctx,
                    format!("node ids must be dense from 0; missing {i}"),
                ));
            }
        }
        let nodes = nodes
            .into_iter()
            .map(|n| {
                let exec =
                    exec_row(&n, &pes, &pe_index).map_err(|r| WorkloadError::invalid(&ctx, r))?;
                Ok(NodeTemplate::new(n.name, n.kind, exec))
            })
            .collect::<Result<Vec<_>, WorkloadError>>()?;
        let dag = AppDag {
            template_name: t.name,
            nodes,
            edges: t.edges.into_iter().map(|[a, b]| (a, b)).collect(),
        };
        templates.push(AppTemplate {
            dag: Arc::new(dag),
            frame_size_kb: t.frame_size_kb,
        });
    }

    let schedule = raw
        .schedule
        .into_iter()
        .map(|e| ScheduleEntry {
            template: e.template,
            count: e.count,
            rate_fps: e.rate_fps,
            arrival: match e.arrival {
                RawArrival::Periodic => ArrivalProcess::Periodic,
                RawArrival::Poisson => ArrivalProcess::Poisson,
            },
            seed: e.seed,
        })
        .collect();

    Ok(WorkloadSpec {
        name: raw.name,
        pes,
        templates,
        schedule,
    })
}

fn exec_row(
    node: &RawNode,
    pes: &[PeDescriptor],
    index: &HashMap<&str, usize>,
) -> Result<Vec<ExecTime>, String> {
    let mut row: Vec<Option<ExecTime>> = vec![None; pes.len()];
    for (pe, value) in &node.exec_ns.0 {
        let &i = index
            .get(pe.as_str())
            .ok_or_else(|| format!("node {} references undeclared PE {pe:?}", node.id))?;
        if row[i].is_some() {
            return Err(format!("node {} lists PE {pe:?} twice", node.id));
        }
        row[i] = Some(match value {
            ExecValue::Ns(ns) => Some(*ns),
            ExecValue::Word(w) if w == UNSUPPORTED => None,
            ExecValue::Word(w) => {
                return Err(format!(
                    "node {}: {w:?} is not a time or \"{UNSUPPORTED}\"",
                    node.id
                ))
            }
        });
    }
    row.into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| format!("node {} has no entry for PE {:?}", node.id, pes[i].name))
        })
        .collect()
}

fn to_raw(spec: &WorkloadSpec) -> RawSpec {
    RawSpec {
        schema_version: SCHEMA_VERSION,
        name: spec.name.clone(),
        pes: spec
            .pes
            .iter()
            .map(|p| RawPe {
                id: p.id,
                name: p.name.clone(),
            })
            .collect(),
        templates: spec
            .templates
            .iter()
            .map(|t| RawTemplate {
                name: t.name().to_string(),
                frame_size_kb: t.frame_size_kb,
                edges: t.dag.edges.iter().map(|&(a, b)| [a, b]).collect(),
                nodes: t
                    .dag
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(id, n)| RawNode {
                        id,
                        name: n.name.clone(),
                        kind: n.kind.clone(),
                        exec_ns: ExecMap(
                            spec.pes
                                .iter()
                                .zip(&n.exec)
                                .map(|(pe, t)| {
                                    let v = match t {
                                        Some(ns) => ExecValue::Ns(*ns),
                                        None => ExecValue::Word(UNSUPPORTED.into()),
                                    };
                                    (pe.name.clone(), v)
                                })
                                .collect(),
                        ),
                    })
                    .collect(),
            })
            .collect(),
        schedule: spec
            .schedule
            .iter()
            .map(|e| RawEntry {
                template: e.template.clone(),
                count: e.count,
                rate_fps: e.rate_fps,
                arrival: match e.arrival {
                    ArrivalProcess::Periodic => RawArrival::Periodic,
                    ArrivalProcess::Poisson => RawArrival::Poisson,
                },
                seed: e.seed,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
name = "mini"

[[pe]]
id = 0
name = "CPU"

[[pe]]
id = 1
name = "ACC"

[[template]]
name = "app"
frame_size_kb = 4
edges = [[0, 1]]

[[template.node]]
id = 0
name = "a"
kind = "cpu"
exec_ns = { CPU = 100, ACC = "unsupported" }

[[template.node]]
id = 1
name = "b"
kind = "fft"
exec_ns = { ACC = 10, CPU = 90 }

[[schedule]]
template = "app"
count = 2
rate_fps = 12.5
arrival = "poisson"
seed = 9
"#;

    #[test]
    fn parses_minimal_file() {
        let spec = parse_spec(MINIMAL).unwrap();
        assert_eq!(spec.pe_count(), 2);
        let dag = &spec.templates[0].dag;
        assert_eq!(dag.nodes[0].exec, vec![Some(100), None]);
        assert_eq!(dag.nodes[1].exec, vec![Some(90), Some(10)]);
        assert_eq!(spec.schedule[0].arrival, ArrivalProcess::Poisson);
        assert_eq!(spec.schedule[0].rate_fps, 12.5);
    }

    #[test]
    fn undeclared_pe_is_a_validation_error() {
        let text = MINIMAL.replace("ACC = 10", "GPU = 10");
        match parse_spec(&text) {
            Err(WorkloadError::Validation { context, reason }) => {
                assert_eq!(context, "template app");
                assert!(reason.contains("GPU"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_pe_entry_is_a_validation_error() {
        let text = MINIMAL.replace(", ACC = \"unsupported\"", "");
        assert!(matches!(
            parse_spec(&text),
            Err(WorkloadError::Validation { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = MINIMAL.replace("count = 2", "count = two");
        match parse_spec(&text) {
            Err(WorkloadError::Parse { line, .. }) => {
                let expected = MINIMAL
                    .lines()
                    .position(|l| l.starts_with("count"))
                    .unwrap()
                    + 1;
                assert_eq!(line, expected);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_schema_version() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(
            parse_spec(&text),
            Err(WorkloadError::Validation { .. })
        ));
    }

    #[test]
    fn cycle_names_the_template() {
        let text = MINIMAL.replace("edges = [[0, 1]]", "edges = [[0, 1], [1, 0]]");
        match parse_spec(&text) {
            Err(WorkloadError::Validation { context, reason }) => {
                assert_eq!(context, "template app");
                assert!(reason.contains("cycle"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimal_round_trip() {
        let spec = parse_spec(MINIMAL).unwrap();
        assert_eq!(parse_spec(&to_toml(&spec)).unwrap(), spec);
    }
}
