//! Binomial intervals and the chi-square goodness-of-fit test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// Two-sided normal quantile for `confidence` (0.95 gives about 1.96).
pub fn z_score(confidence: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + confidence / 2.0)
}

/// Wilson score interval for `successes` out of `trials`. Always inside
/// [0, 1] and always contains the point estimate; `[0, 1]` when `trials = 0`.
pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Interval {
    if trials == 0 {
        return Interval { low: 0.0, high: 1.0 };
    }
    let z = z_score(confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        low: (center - half).clamp(0.0, 1.0).min(p),
        high: (center + half).clamp(0.0, 1.0).max(p),
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: u64,
    pub p_value: f64,
}

/// Pearson test of `observed` against equal expected counts.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquare {
    let cells = observed.len();
    let total: u64 = observed.iter().sum();
    if cells <= 1 || total == 0 {
        return ChiSquare { statistic: 0.0, df: 0, p_value: 1.0 };
    }
    let expected = total as f64 / cells as f64;
    let statistic = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let df = cells as u64 - 1;
    let p_value = ChiSquared::new(df as f64).expect("positive df").sf(statistic);
    ChiSquare { statistic, df, p_value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        assert!((z_score(0.95) - 1.959964).abs() < 1e-6);
        // 50 / 100: center 0.5, half-width 1.96 * sqrt(0.25/100 + z^2/40000) / (1 + z^2/100)
        let iv = wilson(50, 100, 0.95);
        assert!((iv.low - 0.40383).abs() < 1e-4, "{iv:?}");
        assert!((iv.high - 0.59617).abs() < 1e-4, "{iv:?}");
        let all = wilson(1000, 1000, 0.95);
        assert_eq!(all.high, 1.0);
        assert!(all.low < 1.0 && all.low > 0.99);
        assert_eq!(wilson(0, 0, 0.95), Interval { low: 0.0, high: 1.0 });
    }

    #[test]
    fn chi_square_values() {
        let flat = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(flat.statistic, 0.0);
        assert_eq!(flat.df, 3);
        assert!((flat.p_value - 1.0).abs() < 1e-12);
        let skew = chi_square_uniform(&[400, 0, 0, 0]);
        assert_eq!(skew.statistic, 1200.0);
        assert!(skew.p_value < 1e-100);
        // (15^2 + 15^2) / 50 = 9 on 1 df
        let mid = chi_square_uniform(&[65, 35]);
        assert!((mid.statistic - 9.0).abs() < 1e-12);
        assert!((mid.p_value - 0.0026998).abs() < 1e-6);
        assert_eq!(chi_square_uniform(&[7]).df, 0);
    }
}
