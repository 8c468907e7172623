//! Sampler uniformity test and level-set statistics of sampled kernels.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use switchlab::lemmas::{DelocParams, DELOC_SCOPE};
use switchlab::linalg::DEFAULT_RATIONAL_THRESHOLD;
use switchlab::rng;
use switchlab::sampler::{self, enumerate_all_guarded, SamplerConfig, SamplerKind, SizeGuard};
use switchlab::{Error, MatrixId};

use crate::error::{CliError, CliResult};
use crate::estimate::{run_trial, TrialRecord};
use crate::stats::{chi_square_uniform, wilson, Interval};

pub const SIGNIFICANCE: f64 = 1e-3;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SamplerTestReport {
    pub n: usize,
    pub d: usize,
    pub sampler: SamplerKind,
    pub samples: u64,
    pub support_size: usize,
    pub distinct_seen: usize,
    /// Samples outside the enumerated support; must be 0.
    pub outside_support: u64,
    pub chi_square: f64,
    pub df: u64,
    pub p_value: f64,
    pub significance: f64,
    pub passed: bool,
    /// Accepted samples over stub rounds, stub sampler only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
}

/// Draws `samples` matrices and tests them for uniformity over the
/// enumerated support. The stub sampler uses one stream; the MCMC sampler
/// runs an independent chain per sample, each for the configured burn-in.
pub fn sampler_test(n: usize, d: usize, samples: u64, config: &SamplerConfig, guard: SizeGuard) -> CliResult<SamplerTestReport> {
    guard.check(n, d)?;
    config.validate()?;
    if samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    let support: HashMap<MatrixId, usize> =
        enumerate_all_guarded(n, d, guard)?.enumerate().map(|(k, a)| (a.id(), k)).collect();
    let mut counts = vec![0u64; support.len()];
    let mut outside = 0u64;
    let mut tally = |id: MatrixId| match support.get(&id) {
        Some(&k) => counts[k] += 1,
        None => outside += 1,
    };
    let key = rng::grid_key(n, d);
    let mut acceptance_rate = None;
    match config.kind {
        SamplerKind::StubRejection => {
            let mut g = rng::derive(config.seed, key, 0);
            let mut rounds = 0u64;
            for _ in 0..samples {
                let (a, used) = sampler::sample_uniform_counted(n, d, config, &mut g)?;
                rounds += used;
                tally(a.id());
            }
            acceptance_rate = Some(samples as f64 / rounds as f64);
        }
        SamplerKind::Mcmc => {
            for s in 0..samples {
                let a = sampler::sample_mcmc(n, d, config, &mut rng::derive(config.seed, key, s))?;
                tally(a.id());
            }
        }
        SamplerKind::Exhaustive => {
            return Err(CliError::Usage("the exhaustive sampler has nothing to test".into()));
        }
    }
    let chi = chi_square_uniform(&counts);
    Ok(SamplerTestReport {
        n,
        d,
        sampler: config.kind,
        samples,
        support_size: counts.len(),
        distinct_seen: counts.iter().filter(|&&c| c > 0).count(),
        outside_support: outside,
        chi_square: chi.statistic,
        df: chi.df,
        p_value: chi.p_value,
        significance: SIGNIFICANCE,
        passed: outside == 0 && chi.p_value >= SIGNIFICANCE,
        acceptance_rate,
    })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct HistogramBin {
    pub max_level_set: usize,
    pub count: u64,
    /// `count / singular_samples`
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DelocStatsReport {
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    pub failed: u64,
    pub c: f64,
    pub theta: f64,
    pub singular_samples: u64,
    pub histogram: Vec<HistogramBin>,
    /// Singular samples whose largest kernel level set exceeds `theta`.
    pub violations: u64,
    pub violation_fraction: Option<f64>,
    pub scope: String,
}

impl DelocStatsReport {
    pub fn bin_interval(&self, level: usize) -> Interval {
        let count = self.histogram.iter().find(|b| b.max_level_set == level).map_or(0, |b| b.count);
        wilson(count, self.singular_samples, 0.95)
    }
}

pub fn deloc_stats(
    n: usize,
    d: usize,
    trials: u64,
    params: &DelocParams,
    config: &SamplerConfig,
    workers: usize,
) -> CliResult<DelocStatsReport> {
    if n > DEFAULT_RATIONAL_THRESHOLD {
        return Err(Error::SizeGuard { n, d }.into());
    }
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..trials).into_par_iter().map(|t| run_trial(n, d, config, config.seed, t, false)).collect()
    });
    let theta = params.theta(n, d);
    let mut levels: BTreeMap<usize, u64> = BTreeMap::new();
    let mut failed = 0;
    for r in &records {
        match (r.corank, r.max_kernel_level_set) {
            (None, _) => failed += 1,
            (Some(c), Some(m)) if c > 0 => *levels.entry(m).or_default() += 1,
            _ => {}
        }
    }
    let singular: u64 = levels.values().sum();
    let violations = levels.iter().filter(|(&m, _)| m as f64 > theta).map(|(_, &c)| c).sum();
    let histogram = levels
        .iter()
        .map(|(&m, &count)| {
            let iv = wilson(count, singular, 0.95);
            HistogramBin {
                max_level_set: m,
                count,
                fraction: count as f64 / singular as f64,
                ci_low: iv.low,
                ci_high: iv.high,
            }
        })
        .collect();
    Ok(DelocStatsReport {
        n,
        d,
        trials,
        failed,
        c: params.c,
        theta,
        singular_samples: singular,
        histogram,
        violations,
        violation_fraction: (singular > 0).then(|| violations as f64 / singular as f64),
        scope: DELOC_SCOPE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_pass_uniformity() {
        let r = sampler_test(4, 1, 24_000, &SamplerConfig::stub(1000, 11), SizeGuard::default()).unwrap();
        assert_eq!(r.support_size, 24);
        assert_eq!(r.outside_support, 0);
        assert!(r.passed, "{r:?}");
        // every bijection of 4 stubs is a permutation matrix, so nothing is rejected
        assert_eq!(r.acceptance_rate, Some(1.0));
    }

    #[test]
    fn mcmc_without_burn_in_fails() {
        let r = sampler_test(4, 2, 2000, &SamplerConfig::mcmc(Some(0), 3), SizeGuard::default()).unwrap();
        assert_eq!(r.distinct_seen, 1);
        assert!(!r.passed);
    }

    #[test]
    fn guard_refuses() {
        let err = sampler_test(9, 3, 10, &SamplerConfig::stub(10, 0), SizeGuard::default()).unwrap_err();
        assert!(matches!(err, CliError::Core(Error::SizeGuard { .. })));
    }

    #[test]
    fn deloc_on_permutations_is_vacuous() {
        let r = deloc_stats(20, 1, 30, &DelocParams::default(), &SamplerConfig::stub(100, 1), 1).unwrap();
        assert_eq!(r.singular_samples, 0);
        assert!(r.histogram.is_empty());
        assert_eq!(r.violation_fraction, None);
        assert_eq!(r.scope, "certified subset");
    }

    #[test]
    fn huge_c_means_no_violations() {
        let params = DelocParams::new(1e9).unwrap();
        let r = deloc_stats(12, 2, 60, &params, &SamplerConfig::stub(1000, 2), 1).unwrap();
        assert!(r.singular_samples > 0);
        assert_eq!(r.violations, 0);
        assert_eq!(r.histogram.iter().map(|b| b.count).sum::<u64>(), r.singular_samples);
    }
}
