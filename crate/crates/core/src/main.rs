use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use log::error;

use rawboost::batch::{self, AugmentOptions, VerifyOptions};
use rawboost::{ChainSpec, ParameterRanges, DEFAULT_SAMPLE_RATE};

#[derive(Parser)]
#[command(
    name = "rawboost",
    version,
    about = "Raw-waveform data boosting for speech corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Augment every utterance listed in a manifest.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        input_dir: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
        /// Technique digits joined by '+' (series) or '|' (parallel), e.g. "1+2".
        #[arg(long)]
        chain: String,
        #[arg(long, env = "RAWBOOST_SEED")]
        seed: u64,
        /// Parameter ranges (TOML, or JSON with a .json extension).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Provenance log; defaults to <output-dir>/provenance_<chain>.jsonl.
        #[arg(long)]
        provenance: Option<PathBuf>,
        /// Expected sample rate of every input file.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        sample_rate: u32,
    },
    /// Replay a provenance log and check the augmented files.
    Verify {
        #[arg(long)]
        provenance: PathBuf,
        #[arg(long)]
        input_dir: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Write the magnitude response of a multi-band notch filter as CSV.
    DesignFilter {
        /// f_c:delta_f:taps, normalised (<= 0.5) or in Hz. Repeatable.
        #[arg(long = "notch")]
        notches: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE as f64)]
        fs: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Augment {
            manifest,
            input_dir,
            output_dir,
            chain,
            seed,
            config,
            workers,
            provenance,
            sample_rate,
        } => {
            let chain: ChainSpec = match chain.parse() {
                Ok(c) => c,
                Err(e) => return Ok(usage_error(e)),
            };
            let ranges = match config {
                Some(path) => ParameterRanges::load(&path)
                    .with_context(|| format!("loading {}", path.display()))?,
                None => ParameterRanges::default(),
            };
            let report = batch::augment(&AugmentOptions {
                manifest,
                input_dir,
                output_dir,
                chain,
                seed,
                ranges,
                sample_rate,
                workers,
                provenance,
            })?;
            println!(
                "{} augmented, {} failed; provenance in {}",
                report.records.len(),
                report.failures.len(),
                report.provenance_path.display()
            );
            Ok(if report.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Verify {
            provenance,
            input_dir,
            output_dir,
        } => {
            let report = batch::verify(&VerifyOptions {
                provenance,
                input_dir,
                output_dir,
            })?;
            for u in &report.utterances {
                for c in &u.checks {
                    println!("{}: {c}", u.key);
                }
            }
            let failed = report.failed_keys();
            println!(
                "{} utterances verified, {} failed",
                report.utterances.len(),
                failed.len()
            );
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::DesignFilter {
            notches,
            fs,
            points,
            out,
        } => {
            if points < 2 {
                return Ok(usage_error("--points must be at least 2"));
            }
            let specs = match notches
                .iter()
                .map(|n| batch::parse_notch_arg(n, fs))
                .collect::<Result<Vec<_>, _>>()
            {
                Ok(s) => s,
                Err(e) => return Ok(usage_error(e)),
            };
            batch::design_filter_csv(&specs, fs, points, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
