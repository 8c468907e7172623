//! Seeded corank estimation over `(n, d)` grids.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use switchlab::lemmas::max_kernel_level_set;
use switchlab::linalg::{rank_exact_with, DEFAULT_RATIONAL_THRESHOLD};
use switchlab::rng::{self, RNG_ALGORITHM};
use switchlab::sampler::{self, SamplerConfig, SamplerKind};

use crate::error::{CliError, CliResult};
use crate::stats::{wilson, Interval};

/// One sampled matrix. Fully determined by `(n, d, sampler, master_seed,
/// trial_index)`; `wall_time_ms` is only filled in when timing is requested.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub d: usize,
    pub sampler: SamplerKind,
    pub master_seed: u64,
    pub trial_index: u64,
    pub rng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corank: Option<usize>,
    pub rank_confirmed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_kernel_level_set: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stub_attempts: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

pub fn run_trial(
    n: usize,
    d: usize,
    config: &SamplerConfig,
    master_seed: u64,
    trial_index: u64,
    timing: bool,
) -> TrialRecord {
    let started = Instant::now();
    let mut record = TrialRecord {
        n,
        d,
        sampler: config.kind,
        master_seed,
        trial_index,
        rng: RNG_ALGORITHM.to_string(),
        corank: None,
        rank_confirmed: false,
        max_kernel_level_set: None,
        stub_attempts: None,
        error: None,
        wall_time_ms: None,
    };
    let mut g = rng::derive(master_seed, rng::grid_key(n, d), trial_index);
    let outcome = (|| -> switchlab::Result<()> {
        let a = match config.kind {
            SamplerKind::StubRejection => {
                let (a, attempts) = sampler::sample_uniform_counted(n, d, config, &mut g)?;
                record.stub_attempts = Some(attempts);
                a
            }
            _ => sampler::sample(n, d, config, &mut g)?,
        };
        let rank = rank_exact_with(&a, DEFAULT_RATIONAL_THRESHOLD, &mut g);
        record.corank = Some(rank.corank);
        record.rank_confirmed = rank.rationally_confirmed;
        if rank.corank >= 1 && n <= DEFAULT_RATIONAL_THRESHOLD {
            record.max_kernel_level_set = max_kernel_level_set(&a)?;
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    if timing {
        record.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    record
}

/// A grid of experiments, as read from a JSON config file.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub pairs: Vec<(usize, usize)>,
    pub trials: u64,
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl GridSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.pairs.is_empty() {
            return Err(CliError::Usage("grid has no (n, d) pairs".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        if self.sampler.kind == SamplerKind::Exhaustive {
            return Err(CliError::Usage("estimate needs a random sampler".into()));
        }
        for &(n, d) in &self.pairs {
            if n == 0 || d == 0 || d > n {
                return Err(CliError::Usage(format!("invalid pair n={n}, d={d}")));
            }
        }
        self.sampler.validate()?;
        Ok(())
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub d: usize,
    /// Successful trials; failures are kept only in the trial records.
    pub trials: u64,
    pub failed: u64,
    pub singular: u64,
    pub frac_full_rank: f64,
    pub frac_corank_le_1: f64,
    pub frac_singular: f64,
    /// 95% Wilson interval for `frac_corank_le_1`.
    pub wilson_ci_low: f64,
    pub wilson_ci_high: f64,
}

impl SummaryRow {
    pub fn from_records<'a>(n: usize, d: usize, records: impl IntoIterator<Item = &'a TrialRecord>) -> Self {
        let (mut ok, mut failed, mut full, mut le1) = (0u64, 0u64, 0u64, 0u64);
        for r in records {
            match r.corank {
                Some(c) => {
                    ok += 1;
                    full += u64::from(c == 0);
                    le1 += u64::from(c <= 1);
                }
                None => failed += 1,
            }
        }
        let frac = |k: u64| if ok == 0 { 0.0 } else { k as f64 / ok as f64 };
        let Interval { low, high } = wilson(le1, ok, 0.95);
        SummaryRow {
            n,
            d,
            trials: ok,
            failed,
            singular: ok - full,
            frac_full_rank: frac(full),
            frac_corank_le_1: frac(le1),
            frac_singular: frac(ok - full),
            wilson_ci_low: low,
            wilson_ci_high: high,
        }
    }

    pub fn singular_interval(&self) -> Interval {
        wilson(self.singular, self.trials, 0.95)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Estimate {
    /// Sorted by grid position, then `trial_index`.
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

pub fn run_estimate(grid: &GridSpec, timing: bool) -> CliResult<Estimate> {
    grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(grid.workers).build()?;
    let jobs: Vec<(usize, usize, u64)> =
        grid.pairs.iter().flat_map(|&(n, d)| (0..grid.trials).map(move |t| (n, d, t))).collect();
    // an indexed parallel collect keeps job order, whatever the worker count
    let records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, d, t)| run_trial(n, d, &grid.sampler, grid.sampler.seed, t, timing))
            .collect()
    });
    let summary = records
        .chunks(grid.trials as usize)
        .zip(&grid.pairs)
        .map(|(chunk, &(n, d))| SummaryRow::from_records(n, d, chunk))
        .collect();
    Ok(Estimate { records, summary })
}

pub fn records_jsonl(records: &[TrialRecord]) -> CliResult<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "n",
    "d",
    "trials",
    "frac_full_rank",
    "frac_corank_le_1",
    "frac_singular",
    "wilson_ci_low",
    "wilson_ci_high",
];

pub fn summary_csv(rows: &[SummaryRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.d.to_string(),
            r.trials.to_string(),
            r.frac_full_rank.to_string(),
            r.frac_corank_le_1.to_string(),
            r.frac_singular.to_string(),
            r.wilson_ci_low.to_string(),
            r.wilson_ci_high.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(pairs: Vec<(usize, usize)>, trials: u64, workers: usize) -> GridSpec {
        GridSpec { pairs, trials, sampler: SamplerConfig::stub(10_000, 5), out: None, workers }
    }

    #[test]
    fn permutations_are_always_full_rank() {
        let est = run_estimate(&grid(vec![(12, 1)], 50, 1), false).unwrap();
        let row = &est.summary[0];
        assert_eq!((row.trials, row.failed), (50, 0));
        assert_eq!(row.frac_full_rank, 1.0);
        assert_eq!(row.frac_singular, 0.0);
        assert!(est.records.iter().all(|r| r.max_kernel_level_set.is_none()));
    }

    #[test]
    fn summary_matches_records() {
        let est = run_estimate(&grid(vec![(8, 2), (6, 3)], 40, 2), false).unwrap();
        for (row, chunk) in est.summary.iter().zip(est.records.chunks(40)) {
            let singular = chunk.iter().filter(|r| r.corank.unwrap() > 0).count();
            assert_eq!(row.frac_singular, singular as f64 / 40.0);
            assert!(row.wilson_ci_low <= row.frac_corank_le_1 && row.frac_corank_le_1 <= row.wilson_ci_high);
            for r in chunk.iter().filter(|r| r.corank.unwrap() > 0) {
                assert!(r.max_kernel_level_set.is_some());
            }
        }
        assert!(est.records.windows(2).all(|w| (w[0].n, w[0].trial_index) != (w[1].n, w[1].trial_index)));
    }

    #[test]
    fn failures_are_recorded() {
        let mut g = grid(vec![(10, 5)], 3, 1);
        g.sampler.max_rejections = 1;
        let est = run_estimate(&g, false).unwrap();
        let failed = est.records.iter().filter(|r| r.error.is_some()).count() as u64;
        assert_eq!(est.summary[0].failed, failed);
        assert_eq!(est.summary[0].trials + failed, 3);
    }

    #[test]
    fn grid_json_rejects_unknown_fields() {
        let ok = r#"{"pairs":[[10,2]],"trials":5,"sampler":{"kind":"stub_rejection","max_rejections":100,"burn_in_steps":null,"steps_between_samples":1,"seed":3},"workers":2}"#;
        let g: GridSpec = serde_json::from_str(ok).unwrap();
        assert_eq!((g.pairs.clone(), g.workers), (vec![(10, 2)], 2));
        g.validate().unwrap();
        let bad = ok.replace("\"workers\"", "\"threads\"");
        assert!(serde_json::from_str::<GridSpec>(&bad).is_err());
        assert!(grid(vec![], 1, 1).validate().is_err());
        assert!(grid(vec![(3, 4)], 1, 1).validate().is_err());
        assert!(grid(vec![(3, 2)], 0, 1).validate().is_err());
    }

    #[test]
    fn csv_header_is_fixed() {
        let est = run_estimate(&grid(vec![(5, 1)], 3, 1), false).unwrap();
        let text = summary_csv(&est.summary).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_COLUMNS.join(","));
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[..6], ["5", "1", "3", "1", "1", "0"]);
        // Wilson lower bound for 3 / 3 at 95%
        assert!((fields[6].parse::<f64>().unwrap() - 0.4385029682).abs() < 1e-9);
        assert_eq!(fields[7], "1");
    }
}
