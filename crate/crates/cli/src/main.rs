use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use switchlab::lemmas::DelocParams;
use switchlab::linalg::rational::format_vector;
use switchlab::linalg::{self, Side};
use switchlab::sampler::{enumerate_all_guarded, SamplerConfig, SizeGuard};
use switchlab::BiregularMatrix;

use switchlab_cli::diagnostics::{deloc_stats, sampler_test};
use switchlab_cli::error::{EXIT_OK, EXIT_VIOLATIONS};
use switchlab_cli::estimate::{records_jsonl, run_estimate, summary_csv, GridSpec};
use switchlab_cli::verify::{run_verify, total_violations};
use switchlab_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "switchlab", version, about = "Random directed d-regular graphs: ranks, switchings, lemma checks")]
struct Cli {
    /// Master seed (overrides the seed in a config file)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (estimate) or file (other commands); stdout if absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Stub,
    Mcmc,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate corank frequencies over an (n, d) grid
    Estimate {
        /// GridSpec JSON file
        #[arg(long, conflicts_with_all = ["pairs", "trials"])]
        config: Option<PathBuf>,
        /// Comma-separated NxD pairs, e.g. 20x2,40x2
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_enum, default_value_t = Kind::Stub)]
        sampler: Kind,
        #[arg(long, default_value_t = 1_000_000)]
        max_rejections: u64,
        #[arg(long)]
        burn_in: Option<u64>,
        /// Add wall_time_ms to each trial record (breaks byte-identical output)
        #[arg(long)]
        timing: bool,
    },
    /// Run every lemma check over all enumerated A_{n,d}
    Verify {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        d_max: usize,
    },
    /// Chi-square uniformity test of a sampler over the enumerated support
    SamplerTest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Kind::Stub)]
        sampler: Kind,
        #[arg(long, default_value_t = 1_000_000)]
        max_rejections: u64,
        #[arg(long)]
        burn_in: Option<u64>,
    },
    /// Level-set statistics of kernel vectors of sampled singular matrices
    DelocStats {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// List every member of A_{n,d}
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Rank and kernels of a matrix file
    Rank { file: PathBuf },
}

fn sampler_config(kind: Kind, max_rejections: u64, burn_in: Option<u64>, seed: u64) -> SamplerConfig {
    match kind {
        Kind::Stub => SamplerConfig::stub(max_rejections, seed),
        Kind::Mcmc => SamplerConfig::mcmc(burn_in, seed),
    }
}

fn parse_pair(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("expected NxD, got {s:?}"));
    let (n, d) = s.split_once('x').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn run(cli: Cli) -> CliResult<i32> {
    let seed = cli.seed.unwrap_or(0);
    let workers = cli.workers.unwrap_or(1);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Estimate { config, pairs, trials, sampler, max_rejections, burn_in, timing } => {
            let mut grid = match config {
                Some(path) => serde_json::from_str::<GridSpec>(&fs::read_to_string(path)?)?,
                None => GridSpec {
                    pairs: pairs.iter().map(|p| parse_pair(p)).collect::<CliResult<_>>()?,
                    trials: trials.unwrap_or(1000),
                    sampler: sampler_config(sampler, max_rejections, burn_in, seed),
                    out: None,
                    workers,
                },
            };
            if let Some(s) = cli.seed {
                grid.sampler.seed = s;
            }
            if let Some(w) = cli.workers {
                grid.workers = w;
            }
            if let Some(o) = &cli.out {
                grid.out = Some(o.clone());
            }
            let est = run_estimate(&grid, timing)?;
            let summary = match cli.format {
                Format::Csv => summary_csv(&est.summary)?,
                Format::Json => to_json(&est.summary)?,
            };
            match &grid.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("trials.jsonl"), records_jsonl(&est.records)?)?;
                    let name = if cli.format == Format::Csv { "summary.csv" } else { "summary.json" };
                    fs::write(dir.join(name), summary)?;
                }
                None => print!("{summary}"),
            }
            Ok(EXIT_OK)
        }
        Command::Verify { n_max, d_max } => {
            let reports = run_verify(n_max, d_max, SizeGuard::default(), workers)?;
            emit(out, &to_json(&reports)?)?;
            Ok(if total_violations(&reports) == 0 { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::SamplerTest { n, d, samples, sampler, max_rejections, burn_in } => {
            let config = sampler_config(sampler, max_rejections, burn_in, seed);
            let report = sampler_test(n, d, samples, &config, SizeGuard::default())?;
            emit(out, &to_json(&report)?)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::DelocStats { n, d, trials, c } => {
            let params = DelocParams::new(c)?;
            let config = SamplerConfig::stub(1_000_000, seed);
            let report = deloc_stats(n, d, trials, &params, &config, workers)?;
            emit(out, &to_json(&report)?)?;
            Ok(EXIT_OK)
        }
        Command::Enumerate { n, d } => {
            let all = enumerate_all_guarded(n, d, SizeGuard::default())?;
            let mut text = String::new();
            match cli.format {
                Format::Csv => {
                    text.push_str("index,rank,rows\n");
                    for (k, a) in all.enumerate() {
                        let rows: Vec<String> = (0..n)
                            .map(|s| a.row(s).iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "))
                            .collect();
                        text.push_str(&format!("{k},{},{}\n", linalg::rank_rational(&a), rows.join("|")));
                    }
                }
                Format::Json => {
                    let items: Vec<_> = all
                        .map(|a| {
                            let rows: Vec<&[u32]> = (0..n).map(|s| a.row(s)).collect();
                            serde_json::json!({ "rank": linalg::rank_rational(&a), "rows": rows })
                        })
                        .collect();
                    text = to_json(&items)?;
                }
            }
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Rank { file } => {
            let a = BiregularMatrix::parse(&fs::read_to_string(file)?)?;
            let report = linalg::rank_exact(&a);
            let right: Vec<String> = linalg::kernel(&a, Side::Right).vectors.iter().map(|v| format_vector(v)).collect();
            let left: Vec<String> = linalg::kernel(&a, Side::Left).vectors.iter().map(|v| format_vector(v)).collect();
            let text = match cli.format {
                Format::Json => to_json(&serde_json::json!({
                    "n": a.n(),
                    "d": a.d(),
                    "rank": report.rank,
                    "corank": report.corank,
                    "primes_used": report.primes_used,
                    "rationally_confirmed": report.rationally_confirmed,
                    "right_kernel": right,
                    "left_kernel": left,
                }))?,
                Format::Csv => {
                    let mut t = format!("n,d,rank,corank,rationally_confirmed\n{},{},{},{},{}\n", a.n(), a.d(), report.rank, report.corank, report.rationally_confirmed);
                    for v in &right {
                        t.push_str(&format!("right,{v}\n"));
                    }
                    for v in &left {
                        t.push_str(&format!("left,{v}\n"));
                    }
                    t
                }
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
