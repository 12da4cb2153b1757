//! Packet loss rate estimates with Wilson score intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no trial results to aggregate")]
pub struct EmptyResults;

/// Outcome of one slot under one receiver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub k: usize,
    /// Users whose true message was recovered.
    pub recovered: usize,
    /// Recovered messages that no user sent.
    pub false_decodes: usize,
    pub sic_rounds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlrEstimate {
    pub msgs_total: u64,
    pub msgs_lost: u64,
    pub plr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PlrEstimate {
    pub fn from_counts(lost: u64, total: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(lost, total, Z_95);
        Self {
            msgs_total: total,
            msgs_lost: lost,
            plr: if total == 0 { 0.0 } else { lost as f64 / total as f64 },
            ci_low,
            ci_high,
        }
    }

    /// True when the two 95% intervals do not intersect.
    pub fn separated_from(&self, other: &Self) -> bool {
        self.ci_high < other.ci_low || other.ci_high < self.ci_low
    }
}

/// Wilson score interval for `successes` out of `n` at quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn plr(results: &[TrialResult]) -> Result<PlrEstimate, EmptyResults> {
    if results.is_empty() {
        return Err(EmptyResults);
    }
    let total: u64 = results.iter().map(|t| t.k as u64).sum();
    let lost: u64 = results.iter().map(|t| (t.k - t.recovered) as u64).sum();
    Ok(PlrEstimate::from_counts(lost, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial(k: usize, recovered: usize) -> TrialResult {
        TrialResult {
            trial: 0,
            k,
            recovered,
            false_decodes: 0,
            sic_rounds: 0,
        }
    }

    #[test]
    fn extremes() {
        assert_eq!(plr(&[trial(10, 10)]).unwrap().plr, 0.0);
        assert_eq!(plr(&[trial(10, 0)]).unwrap().plr, 1.0);
        assert_eq!(plr(&[]), Err(EmptyResults));
    }

    #[test]
    fn wilson_reference_values() {
        // 5 losses in 1000 messages
        let mut v = vec![trial(10, 10); 100];
        for t in v.iter_mut().take(5) {
            t.recovered = 9;
        }
        let e = plr(&v).unwrap();
        assert_eq!((e.msgs_total, e.msgs_lost), (1000, 5));
        assert_eq!(e.plr, 0.005);
        // direct evaluation of the score interval
        let z: f64 = 1.959963984540054;
        let (n, p) = (1000.0f64, 0.005f64);
        let c = (p + z * z / (2.0 * n)) / (1.0 + z * z / n);
        let h = z / (1.0 + z * z / n) * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
        assert!((e.ci_low - (c - h)).abs() < 1e-15 && (e.ci_high - (c + h)).abs() < 1e-15);
        assert!((e.ci_low - 0.002138).abs() < 1e-6, "{}", e.ci_low);
        assert!((e.ci_high - 0.011651).abs() < 1e-6, "{}", e.ci_high);
    }

    proptest! {
        #[test]
        fn interval_contains_estimate(lost in 0u64..2000, extra in 0u64..2000) {
            let total = lost + extra + 1;
            let e = PlrEstimate::from_counts(lost, total);
            prop_assert!(0.0 <= e.ci_low && e.ci_low <= e.plr && e.plr <= e.ci_high && e.ci_high <= 1.0);
        }

        #[test]
        fn quadrupling_samples_halves_width(lost in 5u64..200, total in 400u64..4000) {
            prop_assume!(lost < total / 2);
            let a = PlrEstimate::from_counts(lost, total);
            let b = PlrEstimate::from_counts(4 * lost, 4 * total);
            let ratio = (a.ci_high - a.ci_low) / (b.ci_high - b.ci_low);
            prop_assert!((ratio / 2.0 - 1.0).abs() < 0.25, "ratio {}", ratio);
        }
    }
}
