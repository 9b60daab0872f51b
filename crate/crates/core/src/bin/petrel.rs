use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use petrel::experiment::{
    build_edge_cloud, build_trace, compare, comparison_table, run_simulation, write_comparison, write_records,
    write_summary, OutputFormat,
};
use petrel::metrics::summarize;
use petrel::workload::{load_trace, write_trace};
use petrel::{EdgeCloudConfig, Policy};

#[derive(Parser)]
#[command(name = "petrel", version, about = "Edge-cloud task scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a task trace.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trace file to write; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one scheduler over one trace.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replay this trace instead of generating one.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        scheduler: Policy,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Compare schedulers across arrival rates and seeds.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Inclusive seed range such as 1..30.
        #[arg(long, value_parser = parse_seed_range)]
        seeds: Option<SeedRange>,
        /// Comma-separated scheduler names; all six when absent.
        #[arg(long, value_delimiter = ',')]
        scheduler: Vec<Policy>,
        /// Comma-separated arrival rates; the configured rate when absent.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tasks: Option<usize>,
    /// Pin the reference topology, latencies and task count.
    #[arg(long)]
    paper_defaults: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

#[derive(Clone)]
struct SeedRange(Vec<u64>);

fn parse_seed_range(raw: &str) -> Result<SeedRange, String> {
    let (a, b) = raw
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {raw:?}"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: u64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty seed range {raw}"));
    }
    Ok(SeedRange((a..=b).collect()))
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var("PETREL_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(anyhow!("PETREL_SEED must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn load_config(common: &Common, lambda: Option<f64>) -> Result<EdgeCloudConfig, Failure> {
    let mut cfg = match &common.config {
        Some(p) => EdgeCloudConfig::load(p).map_err(|e| Failure::Usage(e.into()))?,
        None => EdgeCloudConfig::default(),
    };
    if common.paper_defaults {
        cfg.apply_reference_defaults();
    }
    if let Some(n) = common.tasks {
        cfg.workload.tasks = n;
    }
    if let Some(l) = lambda {
        cfg.workload.lambda = l;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.into()))?;
    Ok(cfg)
}

fn resolve_seed(flag: Option<u64>, cfg: &EdgeCloudConfig) -> Result<u64, Failure> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(cfg.seed),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn generate(common: Common, lambda: Option<f64>, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(&common, lambda)?;
    let seed = resolve_seed(seed, &cfg)?;
    let trace = build_trace(&cfg, cfg.workload.lambda, cfg.workload.tasks, seed).context("generating trace")?;
    match &out {
        Some(p) => {
            let mut w = create(p)?;
            write_trace(&trace, &mut w).context("writing trace")?;
            w.flush()?;
            println!("generated {} tasks with seed {seed} into {}", trace.len(), p.display());
        }
        None => {
            write_trace(&trace, io::stdout().lock()).context("writing trace")?;
            eprintln!("generated {} tasks with seed {seed}", trace.len());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run(
    common: Common,
    lambda: Option<f64>,
    seed: Option<u64>,
    trace_path: Option<PathBuf>,
    policy: Policy,
    out: PathBuf,
    format: OutputFormat,
) -> Result<(), Failure> {
    let cfg = load_config(&common, lambda)?;
    let seed = resolve_seed(seed, &cfg)?;
    let lambda = cfg.workload.lambda;
    let edge = build_edge_cloud(&cfg, seed);
    let trace = match &trace_path {
        Some(p) => load_trace(p).with_context(|| format!("reading {}", p.display()))?,
        None => build_trace(&cfg, lambda, cfg.workload.tasks, seed).context("generating trace")?,
    };
    let output = run_simulation(&cfg, &edge, &trace, policy, lambda, seed).context("simulation failed")?;
    let summary = summarize(&output.records, edge.len()).context("summarizing run")?;

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = create(&out.join("records.csv"))?;
    write_records(&output.records, &mut w)?;
    w.flush()?;
    let mut w = create(&out.join(format!("summary.{}", format.extension())))?;
    write_summary(policy, lambda, seed, &summary, format, &mut w)?;
    w.flush()?;

    println!(
        "{policy}: {} tasks, awt {:.4}, makespan min/avg/max {:.0}/{:.0}/{:.0} ms, speedup {:.3}, delayed {}",
        summary.task_count,
        summary.awt,
        summary.makespan_min,
        summary.makespan_avg,
        summary.makespan_max,
        summary.avg_speedup,
        summary.delayed_tasks
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn compare_cmd(
    common: Common,
    seed: Option<u64>,
    seeds: Option<SeedRange>,
    mut policies: Vec<Policy>,
    mut lambdas: Vec<f64>,
    out: PathBuf,
    format: OutputFormat,
) -> Result<(), Failure> {
    let cfg = load_config(&common, None)?;
    let seeds = match seeds {
        Some(SeedRange(s)) => s,
        None => vec![resolve_seed(seed, &cfg)?],
    };
    if policies.is_empty() {
        policies = Policy::ALL.to_vec();
    }
    if lambdas.is_empty() {
        lambdas = vec![cfg.workload.lambda];
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Failure::Usage(anyhow!("lambda must be > 0, got {bad}")));
    }
    let cmp = compare(&cfg, &policies, &lambdas, &seeds).context("comparison failed")?;

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = create(&out.join(format!("comparison.{}", format.extension())))?;
    write_comparison(&cmp.rows, format, &mut w)?;
    w.flush()?;
    let table = comparison_table(&cmp.rows);
    fs::write(out.join("comparison.txt"), &table).context("writing comparison.txt")?;
    print!("{table}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate {
            common,
            lambda,
            seed,
            out,
        } => generate(common, lambda, seed, out),
        Command::Run {
            common,
            lambda,
            seed,
            trace,
            scheduler,
            out,
            format,
        } => run(common, lambda, seed, trace, scheduler, out, format),
        Command::Compare {
            common,
            seed,
            seeds,
            scheduler,
            lambda,
            out,
            format,
        } => compare_cmd(common, seed, seeds, scheduler, lambda, out, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
