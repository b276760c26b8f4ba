mod common;

use heftrt::hw::{eft_select, ExecEntry, HwConfig, HwScheduler, Parity, PriorityQueue};
use heftrt::model::TaskRecord;
use heftrt::report::{compare_engines, RandomEvent};
use heftrt::sim::{simulate, OverheadModel, SchedulerKind, SimConfig};
use heftrt::sw::{brute_force_best_assignment, heft_rt_schedule, ReadyTask, SchedulerInput};
use proptest::prelude::*;

fn drain_sorted(avgs: &[u64]) -> Vec<u32> {
    let mut q = PriorityQueue::new(avgs.len().max(1));
    for (i, &a) in avgs.iter().enumerate() {
        assert!(q.insert(i as u32, a));
    }
    let mut parity = Parity::Odd;
    let mut quiet = 0;
    let mut flags = Vec::new();
    while quiet < 2 {
        quiet = if q.sort_step(parity, &mut flags) {
            0
        } else {
            quiet + 1
        };
        parity = parity.flip();
    }
    std::iter::from_fn(|| q.dequeue().map(|c| c.qid)).collect()
}

fn stable_reference(avgs: &[u64]) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..avgs.len() as u32).collect();
    idx.sort_by(|&a, &b| avgs[b as usize].cmp(&avgs[a as usize]));
    idx
}

fn exec_row() -> impl Strategy<Value = Vec<Option<u64>>> {
    prop::collection::vec(prop::option::weighted(0.85, 1u64..3_000_000), 1..6)
        .prop_filter("one supported PE", |r| r.iter().any(Option::is_some))
}

fn event(max_n: usize) -> impl Strategy<Value = RandomEvent> {
    (1usize..6)
        .prop_flat_map(move |p| {
            let row = prop::collection::vec(prop::option::weighted(0.85, 1u64..3_000_000), p)
                .prop_filter("one supported PE", |r| r.iter().any(Option::is_some));
            (
                prop::collection::vec(row, 1..=max_n),
                prop::collection::vec(0u64..5_000_000, p),
            )
        })
        .prop_map(|(rows, avail_ns)| RandomEvent {
            avail_ns,
            tasks: rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| TaskRecord::new(i as u64, r).unwrap())
                .collect(),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn queue_drains_in_stable_descending_order(avgs in prop::collection::vec(0u64..6, 1..200)) {
        prop_assert_eq!(drain_sorted(&avgs), stable_reference(&avgs));
    }

    #[test]
    fn engines_agree(ev in event(64)) {
        let t = compare_engines(&ev, &HwConfig::default()).unwrap();
        prop_assert!(t.decisions_match);
        prop_assert!(t.avail_match);
        prop_assert!(t.within_bounds());
    }

    #[test]
    fn engines_agree_with_one_ns_units(ev in event(32)) {
        let cfg = HwConfig { time_unit_ns: 1, w_avg: 24, ..HwConfig::default() };
        let t = compare_engines(&ev, &cfg).unwrap();
        prop_assert!(t.decisions_match && t.avail_match);
    }

    #[test]
    fn eft_select_is_the_lowest_eligible_argmin(
        cells in prop::collection::vec((0u64..50, 0u64..20, any::<bool>()), 1..16)
    ) {
        let finish: Vec<u64> = cells.iter().map(|c| c.0 + c.1).collect();
        let row: Vec<ExecEntry> = cells.iter().map(|c| ExecEntry { value: c.1, supported: c.2 }).collect();
        let expected = (0..cells.len()).filter(|&i| cells[i].2).min_by_key(|&i| (finish[i], i));
        prop_assert_eq!(eft_select(&finish, &row), expected);
    }

    #[test]
    fn heft_is_never_better_than_the_optimum(rows in prop::collection::vec(
        prop::collection::vec(1u64..100, 3).prop_map(|r| r.into_iter().map(Some).collect::<Vec<_>>()), 1..7)
    ) {
        let ready: Vec<ReadyTask> = rows.into_iter().enumerate().map(|(i, r)| {
            let rec = TaskRecord::new(i as u64, r).unwrap();
            ReadyTask::from(&rec)
        }).collect();
        let input = SchedulerInput::new(ready, vec![0; 3]).unwrap();
        let (_, best) = brute_force_best_assignment(&input).unwrap();
        prop_assert!(heft_rt_schedule(&input).makespan() >= best);
    }

    #[test]
    fn hw_avail_registers_track_decisions(ev in event(48)) {
        let cfg = HwConfig { p: ev.avail_ns.len(), ..HwConfig::default() };
        let mut hw = HwScheduler::new(cfg).unwrap();
        let out = hw.run_event_ns(&ev.avail_ns, &ev.tasks).unwrap();
        for pe in 0..cfg.p {
            let last = out.decisions.iter().filter(|d| d.pe == pe).map(|d| d.predicted_finish).next_back();
            if let Some(f) = last {
                prop_assert_eq!(hw.avail()[pe], f);
            }
        }
    }

    #[test]
    fn single_rows_are_valid_records(row in exec_row()) {
        let rec = TaskRecord::new(0, row.clone()).unwrap();
        let supported: Vec<u64> = row.iter().flatten().copied().collect();
        prop_assert!(rec.avg() >= *supported.iter().min().unwrap());
        prop_assert!(rec.avg() <= *supported.iter().max().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn simulations_respect_invariants(seed in any::<u64>(), kind in 0usize..3) {
        let spec = common::random_workload(seed);
        let kind = [SchedulerKind::Software, SchedulerKind::Hardware, SchedulerKind::Fifo][kind];
        let report = simulate(&spec, &SimConfig::new(kind)).unwrap();
        prop_assert_eq!(common::check_invariants(&spec, &report), Ok(()));
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>()) {
        let spec = common::random_workload(seed);
        let cfg = SimConfig::new(SchedulerKind::Hardware);
        prop_assert_eq!(simulate(&spec, &cfg).unwrap(), simulate(&spec, &cfg).unwrap());
    }

    #[test]
    fn engines_are_interchangeable_without_overhead(seed in any::<u64>()) {
        let spec = common::random_workload(seed);
        let run = |kind| {
            let cfg = SimConfig {
                overhead: OverheadModel::zero(),
                quantize_software: true,
                ..SimConfig::new(kind)
            };
            simulate(&spec, &cfg).unwrap()
        };
        let sw = run(SchedulerKind::Software);
        let hw = run(SchedulerKind::Hardware);
        let mut a: Vec<_> = sw.tasks.iter().map(|r| (r.instance, r.node, r.pe)).collect();
        let mut b: Vec<_> = hw.tasks.iter().map(|r| (r.instance, r.node, r.pe)).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        for (x, y) in sw.instances.iter().zip(&hw.instances) {
            prop_assert_eq!(x.cumulative_exec, y.cumulative_exec);
        }
    }
}

#[test]
fn builtin_workloads_respect_invariants() {
    for spec in [
        heftrt::workload::low_workload(),
        heftrt::workload::high_workload(),
    ] {
        for kind in [
            SchedulerKind::Software,
            SchedulerKind::Hardware,
            SchedulerKind::Fifo,
        ] {
            let report = simulate(&spec, &SimConfig::new(kind)).unwrap();
            assert_eq!(
                common::check_invariants(&spec, &report),
                Ok(()),
                "{} {kind}",
                spec.name
            );
        }
    }
}
