use std::path::PathBuf;

use heftrt::model::PeDescriptor;
use heftrt::sim::{simulate, OverheadModel, SchedulerKind, SimConfig};
use heftrt::workload::{
    high_workload, load_spec, low_workload, parse_spec, save_spec, to_toml, WorkloadError,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn shipped_fixtures_are_the_builtin_workloads() {
    assert_eq!(load_spec(fixture("low.toml")).unwrap(), low_workload());
    assert_eq!(load_spec(fixture("high.toml")).unwrap(), high_workload());
    assert_eq!(
        load_spec(fixture("low.toml")).unwrap().total_instances(),
        40
    );
    assert_eq!(
        load_spec(fixture("high.toml")).unwrap().total_instances(),
        20
    );
}

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [low_workload(), high_workload()] {
        let path = dir.path().join("spec.toml");
        save_spec(&spec, &path).unwrap();
        assert_eq!(load_spec(&path).unwrap(), spec);
    }
}

#[test]
fn undeclared_pe_is_a_validation_error() {
    let text = to_toml(&high_workload()).replacen("A53-0 = 150000", "GPU = 150000", 1);
    assert!(matches!(
        parse_spec(&text),
        Err(WorkloadError::Validation { .. })
    ));
}

#[test]
fn missing_pe_entry_names_the_template() {
    let mut spec = high_workload();
    spec.pes.push(PeDescriptor::new(4, "extra"));
    let err = parse_spec(&to_toml(&spec)).unwrap_err();
    match err {
        WorkloadError::Validation { context, .. } => assert!(context.contains("PD"), "{context}"),
        other => panic!("unexpected {other}"),
    }
}

const CHAIN: &str = r#"
schema_version = 1
name = "chain"

[[pe]]
id = 0
name = "cpu"

[[template]]
name = "chain"
frame_size_kb = 1
edges = [[0, 1]]

[[template.node]]
id = 0
name = "a"
kind = "cpu"
exec_ns = { cpu = 5000000 }

[[template.node]]
id = 1
name = "b"
kind = "cpu"
exec_ns = { cpu = 7000000 }

[[schedule]]
template = "chain"
count = 2
rate_fps = 10.0
arrival = "periodic"
seed = 0
"#;

#[test]
fn golden_run_and_events_csv() {
    let spec = parse_spec(CHAIN).unwrap();
    let mut cfg = SimConfig::new(SchedulerKind::Software);
    cfg.overhead = OverheadModel::zero();
    cfg.overhead.zero_compute = false;
    cfg.overhead.software.fixed_ns = 1_000_000.0;
    let report = simulate(&spec, &cfg).unwrap();

    let mut run = Vec::new();
    heftrt::report::write_run_csv(&mut run, &report).unwrap();
    assert_eq!(
        String::from_utf8(run).unwrap(),
        "instance_id,template,arrival_ns,cumulative_exec_ns,app_exec_ns\n\
         0,chain,0,12000000,14000000\n\
         1,chain,100000000,12000000,14000000\n"
    );

    let mut events = Vec::new();
    heftrt::report::write_events_csv(&mut events, &report).unwrap();
    assert_eq!(
        String::from_utf8(events).unwrap(),
        "event_time_ns,n,overhead_ns,scheduler\n\
         0,1,1000000,sw\n\
         6000000,1,1000000,sw\n\
         100000000,1,1000000,sw\n\
         106000000,1,1000000,sw\n"
    );
}
