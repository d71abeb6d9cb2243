//! `octkcf` command-line driver.
//!
//! Exit status: 0 on success, 1 on usage errors (bad flags, bad config),
//! 2 on data errors (missing or malformed sequences, unreadable frames).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;

use octkcf::eval::{self, BenchReport, Sequence};
use octkcf::{selftest, Error, TrackerConfig, TrackerMode};

#[derive(Parser, Debug)]
#[command(name = "octkcf", version, about = "Correlation-filter tracking with constrained model updates")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Track one sequence and write its per-frame CSV.
    Track {
        /// Sequence directory (img/ plus groundtruth_rect.txt).
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<TrackerMode>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both modes over every sequence of a dataset.
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run both modes over a dataset and print the comparison table.
    Compare {
        #[arg(long)]
        dataset: PathBuf,
        /// Also write the full report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check the fast numeric paths against the reference implementations.
    Selftest,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set t_g=2.0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Sequences tracked in parallel (0 = one per logical core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    cfg: ConfigArgs,
}

fn parse_mode(s: &str) -> Result<TrackerMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl ConfigArgs {
    fn load(&self, mode: Option<TrackerMode>) -> Result<TrackerConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) if !path.is_file() => {
                return Err(Failure::Usage(format!("--config: no such file {}", path.display())));
            }
            Some(path) => TrackerConfig::load(path)?,
            None => TrackerConfig::default(),
        };
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k, v).map_err(|e| Failure::Usage(format!("--set {kv}: {e}")))?;
        }
        if let Some(m) = mode {
            cfg.mode = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn both_modes(base: &TrackerConfig) -> Vec<TrackerConfig> {
    [TrackerMode::Kcf, TrackerMode::OctKcf]
        .into_iter()
        .map(|mode| TrackerConfig { mode, ..base.clone() })
        .collect()
}

fn load_dataset(root: &Path) -> Result<Vec<Sequence>, Failure> {
    let dirs = eval::discover_sequences(root)?;
    let mut sequences = Vec::new();
    for dir in dirs {
        match eval::load_sequence(&dir) {
            Ok(s) => sequences.push(s),
            Err(e) => warn!("skipping {}: {e}", dir.display()),
        }
    }
    if sequences.is_empty() {
        return Err(Failure::Data(format!("{}: no loadable sequences", root.display())));
    }
    Ok(sequences)
}

fn benchmark(dataset: &Path, run: &RunArgs) -> Result<BenchReport, Failure> {
    let base = run.cfg.load(None)?;
    let sequences = load_dataset(dataset)?;
    let report = eval::run_benchmark(&sequences, &both_modes(&base), run.jobs)?;
    for f in &report.failures {
        eprintln!("warning: {} [{}] failed: {}", f.sequence, f.label, f.message);
    }
    if report.runs.is_empty() {
        return Err(Failure::Data("every sequence failed".into()));
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Track { seq, mode, cfg, out } => {
            let cfg = cfg.load(mode)?;
            let sequence = eval::load_sequence(&seq)?;
            let result = eval::track_sequence(&sequence, &cfg)?;
            let path = eval::write_run_csv(&result, &out)?;
            println!(
                "{} [{}]: {} frames, precision@20 {:.3}, AUC {:.3}, {:.1} FPS -> {}",
                result.sequence,
                result.label,
                result.rows.len(),
                result.record.precision_20(),
                result.record.auc,
                result.record.fps,
                path.display()
            );
        }
        Command::Bench { dataset, out, run } => {
            let report = benchmark(&dataset, &run)?;
            eval::write_report(&report, &out)?;
            print!("{}", eval::format_table(&report.aggregates));
            println!("results written to {}", out.display());
        }
        Command::Compare { dataset, out, run } => {
            let report = benchmark(&dataset, &run)?;
            if let Some(out) = out {
                eval::write_report(&report, &out)?;
            }
            print!("{}", eval::format_table(&report.aggregates));
        }
        Command::Selftest => {
            let outcomes = selftest::run_all()?;
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} checks, {failed} failed", outcomes.len());
            if failed > 0 {
                return Err(Failure::Data(format!("{failed} selftest checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
