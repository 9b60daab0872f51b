//! Single runs and multi-seed scheduler comparisons.
//!
//! All randomness derives from one replicate seed `s`:
//!
//! ```text
//! topology  = s + fnv1a("topology")
//! trace     = s + fnv1a("trace" | lambda)
//! scheduler = s + fnv1a("scheduler" | policy | lambda)
//! ```
//!
//! so every policy in a comparison sees the same topology and trace for a
//! given `(s, lambda)`.

use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EdgeCloudConfig;
use crate::domain::{EdgeCloud, Task};
use crate::engine::{simulate, SimError, SimOutput, TaskRecord};
use crate::metrics::{summarize, MetricsError, RunSummary};
use crate::schedulers::Policy;
use crate::workload::{generate_trace, WorkloadError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{policy} at lambda {lambda} seed {seed}: {source}")]
    Cell {
        policy: Policy,
        lambda: f64,
        seed: u64,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error("comparison needs at least one {0}")]
    EmptyAxis(&'static str),
}

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            h ^= 0xff;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

pub fn topology_seed(seed: u64) -> u64 {
    seed.wrapping_add(fnv1a(&[b"topology"]))
}

pub fn trace_seed(seed: u64, lambda: f64) -> u64 {
    seed.wrapping_add(fnv1a(&[b"trace", &lambda.to_bits().to_le_bytes()]))
}

pub fn scheduler_seed(seed: u64, policy: Policy, lambda: f64) -> u64 {
    seed.wrapping_add(fnv1a(&[
        b"scheduler",
        policy.token().as_bytes(),
        &lambda.to_bits().to_le_bytes(),
    ]))
}

pub fn build_edge_cloud(config: &EdgeCloudConfig, seed: u64) -> EdgeCloud {
    config.build_edge_cloud(topology_seed(seed))
}

pub fn build_trace(config: &EdgeCloudConfig, lambda: f64, tasks: usize, seed: u64) -> Result<Vec<Task>, WorkloadError> {
    generate_trace(&config.trace_spec(lambda, tasks, trace_seed(seed, lambda)))
}

/// Runs `policy` over `trace`.
pub fn run_simulation(
    config: &EdgeCloudConfig,
    edge: &EdgeCloud,
    trace: &[Task],
    policy: Policy,
    lambda: f64,
    seed: u64,
) -> Result<SimOutput, SimError> {
    let mut scheduler = policy.build(edge, scheduler_seed(seed, policy, lambda), config.delay_quantum());
    simulate(edge, trace, scheduler.as_mut(), config.engine_options())
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub policy: Policy,
    pub lambda: f64,
    pub seed: u64,
    pub output: SimOutput,
    pub summary: RunSummary,
}

/// Generates the trace for `(lambda, seed)` and runs one policy over it.
pub fn run_cell(
    config: &EdgeCloudConfig,
    policy: Policy,
    lambda: f64,
    seed: u64,
) -> Result<CellResult, ExperimentError> {
    let inner = || -> Result<CellResult, ExperimentError> {
        let edge = build_edge_cloud(config, seed);
        let trace = build_trace(config, lambda, config.workload.tasks, seed)?;
        let output = run_simulation(config, &edge, &trace, policy, lambda, seed)?;
        let summary = summarize(&output.records, edge.len())?;
        Ok(CellResult {
            policy,
            lambda,
            seed,
            output,
            summary,
        })
    };
    inner().map_err(|e| ExperimentError::Cell {
        policy,
        lambda,
        seed,
        source: Box::new(e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scheduler: Policy,
    pub lambda: f64,
    pub seeds: Vec<u64>,
    pub awt: Stat,
    pub makespan_min: Stat,
    pub makespan_max: Stat,
    pub makespan_avg: Stat,
    pub avg_speedup: Stat,
    pub bound_violations: Stat,
    pub delayed_tasks: Stat,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Every cell in `(policy, lambda, seed)` order.
    pub cells: Vec<CellResult>,
}

impl Comparison {
    pub fn row(&self, policy: Policy, lambda: f64) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.scheduler == policy && r.lambda == lambda)
    }
}

/// Runs every `(policy, lambda, seed)` cell in parallel and reduces them
/// into one row per `(policy, lambda)`, in input order.
pub fn compare(
    config: &EdgeCloudConfig,
    policies: &[Policy],
    lambdas: &[f64],
    seeds: &[u64],
) -> Result<Comparison, ExperimentError> {
    if policies.is_empty() {
        return Err(ExperimentError::EmptyAxis("scheduler"));
    }
    if lambdas.is_empty() {
        return Err(ExperimentError::EmptyAxis("lambda"));
    }
    if seeds.is_empty() {
        return Err(ExperimentError::EmptyAxis("seed"));
    }
    let grid: Vec<(Policy, f64, u64)> = policies
        .iter()
        .flat_map(|&p| lambdas.iter().flat_map(move |&l| seeds.iter().map(move |&s| (p, l, s))))
        .collect();
    let cells = grid
        .par_iter()
        .map(|&(p, l, s)| run_cell(config, p, l, s))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = cells
        .chunks(seeds.len())
        .map(|chunk| {
            let stat = |f: fn(&RunSummary) -> f64| Stat::of(&chunk.iter().map(|c| f(&c.summary)).collect::<Vec<_>>());
            ComparisonRow {
                scheduler: chunk[0].policy,
                lambda: chunk[0].lambda,
                seeds: seeds.to_vec(),
                awt: stat(|s| s.awt),
                makespan_min: stat(|s| s.makespan_min),
                makespan_max: stat(|s| s.makespan_max),
                makespan_avg: stat(|s| s.makespan_avg),
                avg_speedup: stat(|s| s.avg_speedup),
                bound_violations: stat(|s| s.bound_violations as f64),
                delayed_tasks: stat(|s| s.delayed_tasks as f64),
            }
        })
        .collect();
    Ok(Comparison { rows, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" => Ok(OutputFormat::JsonLines),
            other => Err(format!("unknown format {other:?}; expected csv or json-lines")),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        }
    }
}

pub const RECORD_HEADER: [&str; 13] = [
    "task_id",
    "class",
    "daemon_id",
    "executor",
    "assign_ms",
    "start_ms",
    "completion_ms",
    "turnaround_ms",
    "service_ms",
    "weighted_turnaround",
    "speedup",
    "delays",
    "bound_violated",
];

fn csv_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_records<W: Write>(records: &[TaskRecord], writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_HEADER).map_err(csv_io)?;
    for r in records {
        w.write_record([
            r.task_id.to_string(),
            r.class.token().to_string(),
            r.daemon_id.to_string(),
            r.allocation.to_string(),
            r.assign_time.to_string(),
            r.start_time.to_string(),
            r.completion_time.to_string(),
            r.turnaround.to_string(),
            r.service_time.to_string(),
            r.weighted_turnaround().to_string(),
            r.speedup().to_string(),
            r.delays_taken.to_string(),
            r.bound_violated.map(|b| b.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

const SUMMARY_HEADER: [&str; 9] = [
    "scheduler",
    "task_count",
    "awt",
    "makespan_min",
    "makespan_max",
    "makespan_avg",
    "avg_speedup",
    "bound_violations",
    "delayed_tasks",
];

#[derive(Serialize)]
struct SummaryLine<'a> {
    scheduler: Policy,
    lambda: f64,
    seed: u64,
    #[serde(flatten)]
    summary: &'a RunSummary,
}

pub fn write_summary<W: Write>(
    policy: Policy,
    lambda: f64,
    seed: u64,
    summary: &RunSummary,
    format: OutputFormat,
    mut writer: W,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            let mut header: Vec<&str> = SUMMARY_HEADER.to_vec();
            header.splice(1..1, ["lambda", "seed"]);
            w.write_record(&header).map_err(csv_io)?;
            w.write_record([
                policy.token().to_string(),
                lambda.to_string(),
                seed.to_string(),
                summary.task_count.to_string(),
                summary.awt.to_string(),
                summary.makespan_min.to_string(),
                summary.makespan_max.to_string(),
                summary.makespan_avg.to_string(),
                summary.avg_speedup.to_string(),
                summary.bound_violations.to_string(),
                summary.delayed_tasks.to_string(),
            ])
            .map_err(csv_io)?;
            w.flush()
        }
        OutputFormat::JsonLines => {
            let line = SummaryLine {
                scheduler: policy,
                lambda,
                seed,
                summary,
            };
            serde_json::to_writer(&mut writer, &line)?;
            writeln!(writer)
        }
    }
}

fn seed_list(seeds: &[u64]) -> String {
    seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn write_comparison<W: Write>(rows: &[ComparisonRow], format: OutputFormat, mut writer: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            let mut header = vec!["scheduler".to_string(), "lambda".to_string(), "replicates".to_string()];
            for m in [
                "awt",
                "makespan_min",
                "makespan_max",
                "makespan_avg",
                "avg_speedup",
                "bound_violations",
                "delayed_tasks",
            ] {
                header.push(format!("{m}_mean"));
                header.push(format!("{m}_std"));
            }
            header.push("seeds".into());
            w.write_record(&header).map_err(csv_io)?;
            for r in rows {
                let mut rec = vec![
                    r.scheduler.token().to_string(),
                    r.lambda.to_string(),
                    r.seeds.len().to_string(),
                ];
                for s in [
                    r.awt,
                    r.makespan_min,
                    r.makespan_max,
                    r.makespan_avg,
                    r.avg_speedup,
                    r.bound_violations,
                    r.delayed_tasks,
                ] {
                    rec.push(s.mean.to_string());
                    rec.push(s.std.to_string());
                }
                rec.push(seed_list(&r.seeds));
                w.write_record(&rec).map_err(csv_io)?;
            }
            w.flush()
        }
        OutputFormat::JsonLines => {
            for r in rows {
                serde_json::to_writer(&mut writer, r)?;
                writeln!(writer)?;
            }
            Ok(())
        }
    }
}

/// Aligned plain-text table.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let header = [
        "scheduler",
        "lambda",
        "n",
        "AWT",
        "MinMakespan(ms)",
        "MaxMakespan(ms)",
        "AvgMakespan(ms)",
        "Speedup",
    ];
    let pm = |s: Stat, prec: usize| format!("{:.*} ± {:.*}", prec, s.mean, prec, s.std);
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.scheduler.token().to_string(),
                r.lambda.to_string(),
                r.seeds.len().to_string(),
                pm(r.awt, 3),
                pm(r.makespan_min, 0),
                pm(r.makespan_max, 0),
                pm(r.makespan_avg, 0),
                pm(r.avg_speedup, 3),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let padded: Vec<String> = cells
            .zip(widths.iter())
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &mut header.iter().copied());
    for row in &body {
        line(&mut out, &mut row.iter().map(String::as_str));
    }
    out
}
