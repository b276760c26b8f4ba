//! Randomized cross-checking of the hardware model against the software
//! reference, and cycle tables.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hw::{
    quantize_avail, quantized_ready_task, worst_case_cycles, worst_case_first_decision, CycleStats,
    HwConfig, HwError, HwScheduler,
};
use crate::model::TaskRecord;
use crate::sw::{heft_rt_schedule, SchedulerInput};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub sizes: RangeInclusive<usize>,
    pub pe_counts: Vec<usize>,
    pub seed: u64,
    /// Template for `d`, `w_avg`, clock and time unit; `p` varies per trial.
    pub hw: HwConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            sizes: 1..=512,
            pe_counts: vec![2, 4, 8, 16],
            seed: 1,
            hw: HwConfig::default(),
        }
    }
}

/// One random mapping event.
#[derive(Debug, Clone)]
pub struct RandomEvent {
    pub avail_ns: Vec<u64>,
    pub tasks: Vec<TaskRecord>,
}

/// Draws an event of `n` tasks on `p` PEs. Half the events draw execution
/// times from a handful of values so that equal averages are common; about
/// one entry in eight is unsupported.
pub fn random_event(rng: &mut impl Rng, n: usize, p: usize) -> RandomEvent {
    let coarse = rng.random_bool(0.5);
    let tasks = (0..n)
        .map(|tid| {
            let mut exec: Vec<Option<u64>> = (0..p)
                .map(|_| {
                    if p > 1 && rng.random_ratio(1, 8) {
                        None
                    } else if coarse {
                        Some(rng.random_range(1..=4u64) * 25_000)
                    } else {
                        Some(rng.random_range(1..=2_000_000u64))
                    }
                })
                .collect();
            if exec.iter().all(Option::is_none) {
                exec[rng.random_range(0..p)] = Some(50_000);
            }
            TaskRecord::new(tid as u64, exec).expect("non-empty supported row")
        })
        .collect();
    let avail_ns = (0..p).map(|_| rng.random_range(0..5_000_000u64)).collect();
    RandomEvent { avail_ns, tasks }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub n: usize,
    pub p: usize,
    pub decisions_match: bool,
    pub avail_match: bool,
    pub stats: CycleStats,
}

impl TrialOutcome {
    pub fn within_bounds(&self) -> bool {
        self.stats.total_cycles <= worst_case_cycles(self.n)
            && self.stats.first_decision_cycle <= worst_case_first_decision(self.n)
    }
}

/// Runs one event through both engines on identical quantized inputs.
pub fn compare_engines(event: &RandomEvent, hw: &HwConfig) -> Result<TrialOutcome, HwError> {
    let p = event.avail_ns.len();
    let cfg = HwConfig { p, ..*hw };
    let mut engine = HwScheduler::new(cfg)?;
    let out = engine.run_event_ns(&event.avail_ns, &event.tasks)?;

    let ready = event
        .tasks
        .iter()
        .map(|r| quantized_ready_task(r, &cfg))
        .collect();
    let avail = event
        .avail_ns
        .iter()
        .map(|&t| quantize_avail(t, &cfg).value)
        .collect();
    let reference = heft_rt_schedule(
        &SchedulerInput::with_limit(ready, avail, cfg.accum_max()).expect("valid event"),
    );

    Ok(TrialOutcome {
        n: event.tasks.len(),
        p,
        decisions_match: out.decisions == reference.decisions,
        avail_match: engine.avail() == reference.final_avail.as_slice(),
        stats: out.stats,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub trials: usize,
    pub decision_mismatches: usize,
    pub avail_mismatches: usize,
    pub bound_violations: usize,
    /// Largest `total_cycles / (3n + 3)` seen.
    pub max_cycle_ratio: f64,
    pub max_first_decision_ratio: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.decision_mismatches == 0 && self.avail_mismatches == 0 && self.bound_violations == 0
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "trials,{}", self.trials)?;
        writeln!(out, "decision_mismatches,{}", self.decision_mismatches)?;
        writeln!(out, "avail_mismatches,{}", self.avail_mismatches)?;
        writeln!(out, "bound_violations,{}", self.bound_violations)?;
        writeln!(out, "max_total_over_3n3,{:.6}", self.max_cycle_ratio)?;
        writeln!(
            out,
            "max_first_over_2n3,{:.6}",
            self.max_first_decision_ratio
        )
    }
}

/// Runs `trials` random events, each with a size drawn from `sizes` and a PE
/// count from `pe_counts`.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport, HwError> {
    if opts.pe_counts.is_empty() {
        return Err(HwError::InvalidConfig("no PE counts given".into()));
    }
    if *opts.sizes.start() == 0 || *opts.sizes.end() > opts.hw.d {
        return Err(HwError::EventTooLarge {
            n: *opts.sizes.end(),
            depth: opts.hw.d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = VerifyReport {
        trials: opts.trials,
        ..Default::default()
    };
    for _ in 0..opts.trials {
        let n = rng.random_range(opts.sizes.clone());
        let p = opts.pe_counts[rng.random_range(0..opts.pe_counts.len())];
        let event = random_event(&mut rng, n, p);
        let t = compare_engines(&event, &opts.hw)?;
        report.decision_mismatches += usize::from(!t.decisions_match);
        report.avail_mismatches += usize::from(!t.avail_match);
        report.bound_violations += usize::from(!t.within_bounds());
        report.max_cycle_ratio = report
            .max_cycle_ratio
            .max(t.stats.total_cycles as f64 / worst_case_cycles(n) as f64);
        report.max_first_decision_ratio = report
            .max_first_decision_ratio
            .max(t.stats.first_decision_cycle as f64 / worst_case_first_decision(n) as f64);
    }
    Ok(report)
}

/// Tasks whose averages strictly increase in queue order, which makes the
/// sort take the longest.
pub fn ascending_tasks(n: usize, p: usize) -> Vec<TaskRecord> {
    (0..n)
        .map(|i| TaskRecord::new(i as u64, vec![Some((i as u64 + 1) * 1_000); p]).expect("valid"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRow {
    pub n: usize,
    pub stats: CycleStats,
    pub ns_per_task: f64,
}

/// Cycle counts of the worst-case input for each queue size.
pub fn cycle_table(sizes: &[usize], hw: &HwConfig) -> Result<Vec<CycleRow>, HwError> {
    let mut engine = HwScheduler::new(*hw)?;
    sizes
        .iter()
        .map(|&n| {
            let out = engine.run_event(&vec![0; hw.p], &ascending_tasks(n, hw.p))?;
            let ns_per_task =
                out.stats.total_cycles as f64 * hw.clock_period_ps as f64 / 1_000.0 / n as f64;
            Ok(CycleRow {
                n,
                stats: out.stats,
                ns_per_task,
            })
        })
        .collect()
}

pub fn write_cycle_table<W: Write>(mut out: W, rows: &[CycleRow]) -> io::Result<()> {
    writeln!(
        out,
        "n,fill,sort,drain,total,bound_3n3,first_decision,bound_2n3,ns_per_task"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6}",
            r.n,
            r.stats.fill_cycles,
            r.stats.sort_cycles,
            r.stats.drain_cycles,
            r.stats.total_cycles,
            worst_case_cycles(r.n),
            r.stats.first_decision_cycle,
            worst_case_first_decision(r.n),
            r.ns_per_task
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verify_run_is_clean() {
        let opts = VerifyOptions {
            trials: 50,
            sizes: 1..=40,
            ..Default::default()
        };
        let r = verify(&opts).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.max_cycle_ratio <= 1.0);
    }

    #[test]
    fn single_task_trials() {
        let opts = VerifyOptions {
            trials: 20,
            sizes: 1..=1,
            ..Default::default()
        };
        assert_eq!(verify(&opts).unwrap().decision_mismatches, 0);
    }

    #[test]
    fn cycle_table_hits_the_bound() {
        let rows = cycle_table(&[2, 10], &HwConfig::default()).unwrap();
        for r in rows {
            assert_eq!(r.stats.total_cycles, worst_case_cycles(r.n));
            assert_eq!(r.stats.first_decision_cycle, worst_case_first_decision(r.n));
        }
    }

    #[test]
    fn oversized_range_is_rejected() {
        let opts = VerifyOptions {
            sizes: 1..=513,
            ..Default::default()
        };
        assert!(verify(&opts).is_err());
    }
}
