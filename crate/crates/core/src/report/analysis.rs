//! Summary analytics over sweep and overhead series.

use thiserror::Error;

use crate::hw::{worst_case_cycles, HwConfig};
use crate::sim::OverheadModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("series do not cover the same queue sizes")]
    DomainMismatch,
}

/// Looks for a plateau at the end of a `(target rate, achieved rate)` series
/// sorted by target. Over the last `k` points the relative change of the
/// achieved rate is divided by the relative change of the target rate; if
/// that elasticity is below `epsilon` the mean achieved rate over those
/// points is returned.
pub fn detect_saturation(
    series: &[(f64, f64)],
    epsilon: f64,
    k: usize,
) -> Result<Option<f64>, AnalysisError> {
    let k = k.max(2);
    if series.len() < k + 1 {
        return Err(AnalysisError::TooFewPoints {
            needed: k + 1,
            got: series.len(),
        });
    }
    let tail = &series[series.len() - k..];
    let (t0, a0) = tail[0];
    let (t1, a1) = tail[k - 1];
    let mean_a = tail.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let mean_t = tail.iter().map(|p| p.0).sum::<f64>() / k as f64;
    if mean_a <= 0.0 || t1 <= t0 {
        return Ok(None);
    }
    let elasticity = ((a1 - a0) / mean_a) / ((t1 - t0) / mean_t);
    Ok((elasticity.abs() < epsilon).then_some(mean_a))
}

/// Smallest queue size from which the hardware overhead is below the
/// software overhead at every larger sampled size.
pub fn detect_crossover(
    hw: &[(usize, u64)],
    sw: &[(usize, u64)],
) -> Result<Option<usize>, AnalysisError> {
    let mut hw = hw.to_vec();
    let mut sw = sw.to_vec();
    hw.sort_unstable();
    sw.sort_unstable();
    if hw.is_empty() || hw.len() != sw.len() || hw.iter().zip(&sw).any(|(h, s)| h.0 != s.0) {
        return Err(AnalysisError::DomainMismatch);
    }
    let mut crossover = None;
    for (h, s) in hw.iter().zip(&sw).rev() {
        if h.1 < s.1 {
            crossover = Some(h.0);
        } else {
            break;
        }
    }
    Ok(crossover)
}

/// Worst-case hardware overhead of one `n`-task event (ascending input,
/// `3n + 3` cycles), split into batches of at most `d` like the simulator does.
pub fn hw_event_overhead(n: usize, model: &OverheadModel, hw: &HwConfig) -> u64 {
    let mut left = n;
    let mut total = 0;
    while left > 0 {
        let m = left.min(hw.d);
        total += model.hardware_ns(m, worst_case_cycles(m), hw);
        left -= m;
    }
    total
}

/// `(queue size, overhead ns)` points.
pub type OverheadSeries = Vec<(usize, u64)>;

/// Software and hardware overhead over `sizes`, in that order.
pub fn overhead_curves(
    sizes: &[usize],
    model: &OverheadModel,
    hw: &HwConfig,
) -> (OverheadSeries, OverheadSeries) {
    let sw = sizes.iter().map(|&n| (n, model.software_ns(n))).collect();
    let hw = sizes
        .iter()
        .map(|&n| (n, hw_event_overhead(n, model, hw)))
        .collect();
    (sw, hw)
}

/// Hardware fixed transfer costs (ns, in `step` increments up to `max`) that
/// put the crossover exactly at `target` over queue sizes `1..=d`, with the
/// per-task transfer cost and software coefficients taken from `model`.
/// The fixed cost is split evenly between the send and result legs.
pub fn calibrate_transfer_fixed(
    model: &OverheadModel,
    hw: &HwConfig,
    target: usize,
    step: u64,
    max: u64,
) -> Vec<u64> {
    let sizes: Vec<usize> = (1..=hw.d).collect();
    let mut hits = Vec::new();
    let mut fixed = 0;
    while fixed <= max {
        let mut m = *model;
        m.transfer.transfer_fixed_ns = fixed / 2;
        m.transfer.result_fixed_ns = fixed - fixed / 2;
        let (sw, hwc) = overhead_curves(&sizes, &m, hw);
        if detect_crossover(&hwc, &sw) == Ok(Some(target)) {
            hits.push(fixed);
        }
        fixed += step;
    }
    hits
}

/// Least-squares fit `y = a + b x`, returning `(a, b, r_squared)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (a, b, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_targets(achieved: &[f64]) -> Vec<(f64, f64)> {
        achieved
            .iter()
            .enumerate()
            .map(|(i, &a)| (50.0 * (i + 1) as f64, a))
            .collect()
    }

    #[test]
    fn saturation_examples() {
        let s = with_targets(&[50.0, 100.0, 150.0, 160.0, 161.0, 161.0]);
        let plateau = detect_saturation(&s, 0.05, 3).unwrap().unwrap();
        assert!((plateau - 160.666).abs() < 0.01);

        let linear: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 3.0 * i as f64)).collect();
        assert_eq!(detect_saturation(&linear, 0.05, 3), Ok(None));

        assert!(matches!(
            detect_saturation(&s, 0.05, 6),
            Err(AnalysisError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn crossover_examples() {
        let sw: Vec<(usize, u64)> = (1..=10).map(|n| (n, 10 * n as u64)).collect();
        let lower: Vec<(usize, u64)> = (1..=10).map(|n| (n, 5 * n as u64)).collect();
        let higher: Vec<(usize, u64)> = (1..=10).map(|n| (n, 20 * n as u64)).collect();
        assert_eq!(detect_crossover(&lower, &sw), Ok(Some(1)));
        assert_eq!(detect_crossover(&higher, &sw), Ok(None));

        let flat: Vec<(usize, u64)> = (1..=10).map(|n| (n, 55)).collect();
        assert_eq!(detect_crossover(&flat, &sw), Ok(Some(6)));

        assert_eq!(
            detect_crossover(&flat[..9], &sw),
            Err(AnalysisError::DomainMismatch)
        );
    }

    #[test]
    fn crossover_must_hold_to_the_end() {
        let sw = vec![(1, 10), (2, 10), (3, 10)];
        let hw = vec![(1, 20), (2, 5), (3, 11)];
        assert_eq!(detect_crossover(&hw, &sw), Ok(None));
    }

    #[test]
    fn fit_of_a_line_is_exact() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 + 3.0 * i as f64)).collect();
        let (a, b, r2) = linear_fit(&pts);
        assert!((a - 2.0).abs() < 1e-9 && (b - 3.0).abs() < 1e-9 && (r2 - 1.0).abs() < 1e-12);
    }
}
