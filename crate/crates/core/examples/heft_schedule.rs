//! Maps one ready queue with HEFT_RT and with the FIFO baseline, and compares
//! both makespans with the exhaustive optimum.

use heftrt::sw::{
    brute_force_best_assignment, fifo_schedule, heft_rt_schedule, ReadyTask, SchedulerInput,
};

fn task(tid: u64, exec: [Option<u64>; 3]) -> ReadyTask {
    let supported: Vec<u64> = exec.iter().flatten().copied().collect();
    let avg = supported.iter().sum::<u64>() / supported.len() as u64;
    ReadyTask {
        tid,
        avg,
        exec: exec.to_vec(),
    }
}

fn main() {
    // two CPUs and an accelerator that only runs the transforms
    let ready = vec![
        task(0, [Some(30), Some(30), None]),
        task(1, [Some(120), Some(120), Some(12)]),
        task(2, [Some(120), Some(120), Some(12)]),
        task(3, [Some(25), Some(25), None]),
        task(4, [Some(200), Some(200), None]),
    ];
    let input = SchedulerInput::new(ready, vec![0, 10, 0]).expect("valid queue");

    for (name, schedule) in [
        ("heft_rt", heft_rt_schedule(&input)),
        ("fifo", fifo_schedule(&input)),
    ] {
        println!("{name}: makespan {}", schedule.makespan());
        for d in &schedule.decisions {
            println!(
                "  task {} -> PE{} finishes at {}",
                d.tid, d.pe, d.predicted_finish
            );
        }
    }
    let (assignment, best) = brute_force_best_assignment(&input).expect("small enough");
    println!("optimum: makespan {best}, assignment {assignment:?}");
}
