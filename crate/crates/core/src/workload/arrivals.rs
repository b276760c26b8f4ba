use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{ArrivalProcess, ScheduleEntry};
use crate::time::SimTime;

/// Arrival times of every instance of one schedule entry, starting at zero.
///
/// Periodic arrivals are at `k / rate`; Poisson arrivals accumulate
/// exponential gaps of mean `1 / rate` drawn from a ChaCha8 stream seeded by
/// the entry. Times are rounded to the nearest nanosecond.
pub fn generate_arrivals(entry: &ScheduleEntry) -> Vec<SimTime> {
    let period_ns = 1e9 / entry.rate_fps;
    match entry.arrival {
        ArrivalProcess::Periodic => (0..entry.count)
            .map(|k| SimTime::from_ns((k as f64 * period_ns).round() as u64))
            .collect(),
        ArrivalProcess::Poisson => {
            let mut rng = ChaCha8Rng::seed_from_u64(entry.seed);
            let gap = Exp::new(1.0 / period_ns).expect("rate validated positive");
            let mut t = 0.0f64;
            (0..entry.count)
                .map(|k| {
                    if k > 0 {
                        t += gap.sample(&mut rng);
                    }
                    SimTime::from_ns(t.round() as u64)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(arrival: ArrivalProcess, count: usize, rate_fps: f64, seed: u64) -> ScheduleEntry {
        ScheduleEntry {
            template: "x".into(),
            count,
            rate_fps,
            arrival,
            seed,
        }
    }

    #[test]
    fn periodic_examples() {
        assert_eq!(
            generate_arrivals(&entry(ArrivalProcess::Periodic, 3, 100.0, 0)),
            vec![SimTime::ZERO, SimTime::from_ms(10), SimTime::from_ms(20)]
        );
        assert_eq!(
            generate_arrivals(&entry(ArrivalProcess::Periodic, 1, 7.0, 0)),
            vec![SimTime::ZERO]
        );
        assert_eq!(
            generate_arrivals(&entry(ArrivalProcess::Poisson, 1, 7.0, 3)),
            vec![SimTime::ZERO]
        );
    }

    #[test]
    fn poisson_is_reproducible() {
        let e = entry(ArrivalProcess::Poisson, 50, 250.0, 42);
        assert_eq!(generate_arrivals(&e), generate_arrivals(&e));
        let other = entry(ArrivalProcess::Poisson, 50, 250.0, 43);
        assert_ne!(generate_arrivals(&e), generate_arrivals(&other));
    }

    #[test]
    fn poisson_mean_gap() {
        let e = entry(ArrivalProcess::Poisson, 10_000, 200.0, 7);
        let a = generate_arrivals(&e);
        let mean_gap = a.last().unwrap().as_ns() as f64 / (a.len() - 1) as f64;
        let expected = 1e9 / 200.0;
        assert!(
            (mean_gap - expected).abs() / expected < 0.05,
            "mean gap {mean_gap}"
        );
    }
}
