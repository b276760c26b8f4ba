//! Scheduling overhead of both engines against ready-queue size, the queue
//! size where the hardware engine starts to win, and the range of fixed
//! transfer costs that keep that crossover where it is.

use heftrt::hw::{event_compute_ns, worst_case_cycles, HwConfig};
use heftrt::report::{calibrate_transfer_fixed, detect_crossover, overhead_curves};
use heftrt::sim::OverheadModel;

fn main() {
    let hw = HwConfig::default();
    let model = OverheadModel::default();
    let sizes: Vec<usize> = (1..=hw.d).collect();
    let (sw, hwc) = overhead_curves(&sizes, &model, &hw);

    println!("n,sw_ns,hw_ns");
    for &n in &[1, 2, 4, 5, 6, 8, 16, 64, 256, 512] {
        println!("{n},{},{}", sw[n - 1].1, hwc[n - 1].1);
    }
    let n_star = detect_crossover(&hwc, &sw).expect("same sizes");
    eprintln!("crossover at n = {n_star:?}");

    let n = 1330;
    let compute_hw: u64 = [512, 512, 306]
        .iter()
        .map(|&m| event_compute_ns(worst_case_cycles(m), &hw))
        .sum();
    eprintln!(
        "compute-only speedup at n = {n}: {:.0}x",
        model.software_ns(n) as f64 / compute_hw as f64
    );

    let hits = calibrate_transfer_fixed(&model, &hw, 6, 1_000, 1_000_000);
    if let (Some(lo), Some(hi)) = (hits.first(), hits.last()) {
        eprintln!("fixed transfer cost giving n* = 6: {lo}..={hi} ns");
    }
}
